#pragma once

#include <armadillo>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nctopo/grid.hpp"

namespace nctopo {

/// Raised for invalid configurations; the message names the violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Boundary { magnetic_periodic, dirichlet_all, dirichlet_last_axis };

enum class PotentialKind { none, quasi_periodic, random_bumps };

using FieldTensor = std::array<std::array<double, 3>, 3>;

struct PotentialSpec {
  PotentialKind kind = PotentialKind::none;
  /// W: bump amplitudes are uniform on [-W, W]; cosine modes carry amplitude W.
  double amplitude = 0.0;
  /// Support radius of the polynomial bump (length units).
  double bump_radius = 0.5;
  std::vector<Point> wavevectors;
};

struct ModelConfig {
  int dim = 2;
  double box_length = 0.0;
  double spacing = 1.0;
  /// Per-axis site counts; zero entries fall back to box_length / spacing.
  Coord sites_per_axis{0, 0, 0};
  /// Uniform field strength B_jk (flux per unit area). The symmetric gauge is
  /// A_j = -1/2 sum_k B_jk x_k.
  FieldTensor field{};
  PotentialSpec potential;
  Boundary boundary = Boundary::dirichlet_all;
  int dofs = 1;
  /// Per internal dof: +1 or -1 multiplies the field (spin-resolved flux). Empty means all +1.
  std::vector<int> dof_field_sign;
  /// Per internal dof on-site energy. Empty means zero.
  std::vector<double> dof_onsite;
  /// Sublattice potential staggered * (-1)^{sum of site coordinates}.
  double staggered = 0.0;

  int sites(int axis) const;
  Grid grid() const;
  /// B_jk L_j L_k / 2pi.
  double flux_quanta(int j, int k) const;
  void validate() const;
};

struct DisorderSample {
  std::uint64_t omega_id = 0;
  /// One bump amplitude per lattice site (random_bumps) or one phase per mode (quasi_periodic).
  std::vector<double> parameters;
  /// V_omega evaluated on the sites.
  std::vector<double> potential_values;
};

struct OperatorKernel {
  arma::cx_mat matrix;
  Grid grid;
  /// Origin of the symmetric gauge (box center); unused for the torus gauge.
  Point gauge_center{0.0, 0.0, 0.0};
};

/// Compactly supported C^2 bump (1 - r^2/R^2)^3.
double bump_profile(double r, double radius);

DisorderSample sample_disorder(const ModelConfig& config, std::uint64_t seed);

/// T_a omega for a lattice shift (length units, one entry per axis).
DisorderSample translate_sample(const ModelConfig& config, const DisorderSample& sample, const Point& shift);

OperatorKernel build_bulk_hamiltonian(const ModelConfig& config, const DisorderSample& sample);
OperatorKernel build_edge_hamiltonian(const ModelConfig& config, const DisorderSample& sample);

/// Hopping part only (no potential, no on-site terms).
OperatorKernel build_kinetic(const ModelConfig& config);

/// Discrete magnetic translation U = D S with (S psi)(x) = psi(x - a); D solves the gauge
/// matching D(x) K(x-a, y-a) conj(D(y)) = K(x, y) on every link.
class MagneticTranslation {
 public:
  MagneticTranslation(const ModelConfig& config, const Coord& shift_sites);

  /// U A U^*.
  arma::cx_mat conjugate(const arma::cx_mat& a) const;
  arma::cx_mat matrix() const;

 private:
  std::vector<std::size_t> target_;
  std::vector<std::complex<double>> phase_;
};

std::string to_string(Boundary b);
std::string to_string(PotentialKind k);
Boundary boundary_from_string(const std::string& s);
PotentialKind potential_from_string(const std::string& s);

}  // namespace nctopo
