#pragma once

#include <numbers>

#include "nctopo/lattice_model.hpp"

namespace fixtures {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Clean square box of n x n unit-spaced sites with `flux` quanta through it.
inline nctopo::ModelConfig landau_box(int n, double flux, nctopo::Boundary b = nctopo::Boundary::dirichlet_all) {
  nctopo::ModelConfig m;
  m.dim = 2;
  m.spacing = 1.0;
  m.box_length = n;
  const double field = two_pi * flux / (double(n) * n);
  m.field[0][1] = field;
  m.field[1][0] = -field;
  m.boundary = b;
  return m;
}

/// Strip periodic along axis 0, open along axis 1, with field strength `field`.
inline nctopo::ModelConfig landau_strip(int n_along, int n_across, double field) {
  nctopo::ModelConfig m;
  m.dim = 2;
  m.spacing = 1.0;
  m.sites_per_axis = {n_along, n_across, 0};
  m.field[0][1] = field;
  m.field[1][0] = -field;
  m.boundary = nctopo::Boundary::dirichlet_last_axis;
  return m;
}

inline nctopo::ModelConfig chain(int n, nctopo::Boundary b) {
  nctopo::ModelConfig m;
  m.dim = 1;
  m.spacing = 1.0;
  m.box_length = n;
  m.boundary = b;
  return m;
}

inline nctopo::DisorderSample clean(const nctopo::ModelConfig& m) { return nctopo::sample_disorder(m, 0); }

}  // namespace fixtures
