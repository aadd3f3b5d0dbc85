#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nctopo/invariants.hpp"
#include "nctopo/spectral.hpp"

namespace nctopo {

struct SobolevReport {
  /// (r, p) -> ||A||_{r,p}
  std::map<std::pair<int, int>, double> norms;
  std::map<std::pair<int, int>, bool> finite;
};

/// sum_{|alpha| <= r} Tr_tau(|d^alpha A|^p)^{1/p}, Tr_tau the ensemble-averaged trace per unit
/// volume over `w`. Supported: p in {1, 2, 4, 6}, r <= 4.
double sobolev_norm(std::span<const OperatorKernel> ensemble, int r, int p, const TraceWindow& w = {1.0, 0});

SobolevReport sobolev_report(std::span<const OperatorKernel> ensemble, int max_r, const std::vector<int>& ps,
                             const TraceWindow& w = {1.0, 0});

/// Ensemble mean of a kernel magnitude binned by distance (bins of one lattice spacing).
struct DecayProfile {
  std::vector<double> distance;
  std::vector<double> mean;
  std::vector<long> count;
};

struct DecayFitOptions {
  double r_min_sites = 2.0;      ///< fit window starts at r_min_sites * a
  double r_max_fraction = 1.0 / 3.0;  ///< and ends at this fraction of the shortest side
  double r2_threshold = 0.9;
  double ml_threshold = 5.0;     ///< m * L needed to call the decay resolved
  int min_samples = 5;
};

struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;     ///< m, 1/length
  double rate_ci = 0.0;  ///< 95% half-width
  double r_squared = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double box_length = 0.0;
  bool super_exponential = false;
  bool decays = false;
  int samples = 0;
  DecayProfile profile;

  std::string verdict() const { return decays ? "decay" : "no decay"; }
};

/// Log-linear fit of a profile over the window set by `opt`. Throws std::domain_error when fewer
/// than three bins with positive mean fall in the window.
DecayFit fit_decay(const DecayProfile& profile, double spacing, double box_length, const DecayFitOptions& opt);

/// Bins E ||P(x, y)|| (operator norm of the internal-dof block) by |x - y|.
DecayFit kernel_decay_fit(std::span<const Projection> ensemble, const DecayFitOptions& opt = {});

struct FractionalMomentOptions {
  double s = 0.5;
  double energy_lo = 0.0;
  double energy_hi = 0.0;
  int energies = 5;
  /// eta = eta_fraction * spectral width
  double eta_fraction = 1e-3;
  DecayFitOptions fit{2.0, 1.0 / 3.0, 0.9, 5.0, 1};
};

struct FractionalMomentResult {
  double eta = 0.0;
  double intercept = 0.0;  ///< zero-distance mean, bounded by eta^{-s}
  DecayFit fit;
};

/// E ||chi_x (H - E - i eta)^{-1} chi_y||^s averaged over E in [energy_lo, energy_hi] and the ensemble.
FractionalMomentResult fractional_moment(std::span<const SpectralData> ensemble, const FractionalMomentOptions& opt);

enum class MobilityVerdict { spectral_gap, mobility_gap_candidate, delocalized };

std::string to_string(MobilityVerdict v);

struct MobilityOptions {
  /// DOS counted in [mu - h, mu + h], h = dos_window_fraction * spectral width.
  double dos_window_fraction = 0.01;
  /// States per unit volume per unit energy below which mu is called gapped.
  double dos_cutoff = 1e-9;
  DecayFitOptions fit;
  int min_samples = 10;
};

struct MobilityReport {
  double mu = 0.0;
  double dos = 0.0;
  double min_gap_distance = 0.0;
  DecayFit decay;
  SobolevReport sobolev;
  MobilityVerdict verdict = MobilityVerdict::delocalized;
};

MobilityReport mobility_report(std::span<const SpectralData> ensemble, double mu, const MobilityOptions& opt = {});

}  // namespace nctopo
