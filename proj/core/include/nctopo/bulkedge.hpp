#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nctopo/invariants.hpp"
#include "nctopo/lattice_model.hpp"
#include "nctopo/spectral.hpp"

namespace nctopo {

class EigenCache;

struct EdgeUnitary {
  arma::cx_mat matrix;
  double gap_lo = 0.0;
  double gap_hi = 0.0;
  Grid grid;
};

/// exp(2 pi i f_exp(H_s)). If `bulk` is given, any bulk eigenvalue inside the switch interval
/// is an error: the correspondence is undefined there.
EdgeUnitary edge_unitary(const SpectralData& edge, const SwitchFunction& f_exp, const SpectralData* bulk = nullptr);

/// e^{-i pi f_ind/2} (1 + R_c)/2 e^{+i pi f_ind/2}, a projection for any H_s.
arma::cx_mat chiral_edge_projection(const SpectralData& edge, const arma::cx_mat& chiral, const SwitchFunction& f_ind);

/// Boundary-normalized trace of U^*[X_1, U]: the along-edge axis (0) is restricted by
/// w.core_fraction, the transverse axis is summed over the half containing the upper boundary,
/// and the sum is divided by the edge length.
double edge_trace(const EdgeUnitary& u, const TraceWindow& w = {1.0, 0});

/// C_1 * edge_trace.
InvariantResult edge_winding(const EdgeUnitary& u, const TraceWindow& w = {1.0, 0});

struct BulkEdgeSetup {
  ModelConfig bulk;  ///< dirichlet_all box
  ModelConfig edge;  ///< dirichlet_last_axis strip
  double mu = 0.0;
  double gap_center = 0.0;
  double gap_half_width = 0.0;
  TraceWindow bulk_window{0.5, 0};
  TraceWindow edge_window{1.0, 0};
  FredholmOptions fredholm;
};

struct BulkEdgeRow {
  std::uint64_t seed = 0;
  InvariantResult chern;
  std::optional<long> fredholm;
  std::string fredholm_error;
  InvariantResult edge;
  double edge_trace = 0.0;
  double discrepancy = 0.0;  ///< |Ch + edge pairing|
};

struct BulkEdgeReport {
  std::vector<BulkEdgeRow> rows;
  bool integers_constant = true;
  double max_discrepancy = 0.0;
};

BulkEdgeReport bulk_edge_check(const BulkEdgeSetup& setup, std::span<const std::uint64_t> seeds, int threads = 1,
                               const EigenCache* cache = nullptr);

struct ProbeRow {
  double layer_amplitude = 0.0;
  double in_gap_states = 0.0;        ///< mean count per sample
  double participation_fraction = 0.0;  ///< mean participation length along the edge / edge length
  double edge_weight = 0.0;          ///< mean weight within a quarter strip of either boundary
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
};

/// In-gap eigenstates of the strip as i.i.d. disorder of growing strength is added within
/// `layer_depth` sites of both open boundaries.
ProbeReport edge_delocalization_probe(const ModelConfig& edge, double gap_lo, double gap_hi,
                                      const std::vector<double>& layer_amplitudes, int layer_depth,
                                      std::span<const std::uint64_t> seeds, int threads = 1);

}  // namespace nctopo
