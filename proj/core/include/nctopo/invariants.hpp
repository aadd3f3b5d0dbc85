#pragma once

#include <armadillo>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nctopo/lattice_model.hpp"
#include "nctopo/spectral.hpp"

namespace nctopo {

/// Centered core block, core_fraction of the side length per axis, minus `margin`
/// sites at each open end.
struct TraceWindow {
  double core_fraction = 0.5;
  int margin = 0;
};

/// Sites of the window; throws std::invalid_argument if it is empty.
std::vector<std::size_t> window_sites(const Grid& grid, const TraceWindow& w);

enum class Method { cyclic_even, cyclic_odd, fredholm_kernel, kitaev_triple, mod2, edge_winding };

std::string to_string(Method m);

struct InvariantResult {
  Method method = Method::cyclic_even;
  std::complex<double> value;
  /// Set for integer-valued methods.
  std::optional<long> integer;
  TraceWindow window;
  double standard_error = 0.0;
  int samples = 1;

  double real() const { return value.real(); }
  double imag_abs() const { return std::abs(value.imag()); }
};

/// |core|^{-1} sum over core sites of the internal-dof trace of A(x, x), per unit volume.
std::complex<double> trace_per_unit_volume(const arma::cx_mat& a, const Grid& grid, const TraceWindow& w);
inline std::complex<double> trace_per_unit_volume(const OperatorKernel& a, const TraceWindow& w) {
  return trace_per_unit_volume(a.matrix, a.grid, w);
}

/// [X_j, A] as the kernel (x_j - y_j) A(x, y); periodic axes use the minimum image.
arma::cx_mat position_commutator(const arma::cx_mat& a, const Grid& grid, int axis);

/// (-2 pi i)^{d/2} / (d/2)!  sum_sigma sign(sigma) Tvol(P prod_j [X_sigma(j), P]).
InvariantResult even_chern(const Projection& p, const TraceWindow& w);

/// C_d sum_sigma sign(sigma) Tvol(prod_j U^* [X_sigma(j), U]), C_{2n+1} = 2 (2 pi i)^n n! / (2n+1)!.
InvariantResult odd_chern(const ChiralUnitary& u, const TraceWindow& w);

std::complex<double> even_constant(int d);
std::complex<double> odd_constant(int d);

/// Raised when the singular spectrum has no clean gap for the kernel threshold.
class AmbiguousIndex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FredholmOptions {
  /// Point where the phase of X1 + i X2 is centered; defaults to the box center.
  std::optional<Point> center;
  /// A near-zero singular vector counts when more than localization_weight of its norm sits
  /// inside the bulk window. Vectors stuck to the box boundary are finite-size partners.
  TraceWindow bulk{0.5, 0};
  double localization_weight = 0.5;
  double search_ceiling = 0.5;
  double min_gap_ratio = 10.0;
};

struct IndexReport {
  long index = 0;
  long kernel = 0;
  long cokernel = 0;
  /// Small singular values below the threshold, including boundary-attached ones.
  std::vector<double> small_values;
  double threshold = 0.0;
  double gap_ratio = std::numeric_limits<double>::infinity();
};

/// Index of P F P on ran P, F the phase of (X1 + i X2 - center).
IndexReport fredholm_index(const Projection& p, const FredholmOptions& opt = {});

struct SectorPartition {
  std::vector<std::size_t> a, b, c;  ///< site indices
};

/// Three 120-degree sectors of the window around the center, in clockwise order
/// A -> B -> C. With this order the triple formula carries the sign of the Fredholm index.
SectorPartition kitaev_sectors(const Grid& grid, const TraceWindow& w, std::optional<Point> center = {});

/// 12 pi i sum_{j in A, k in B, l in C} (P_jk P_kl P_lj - P_jl P_lk P_kj).
double kitaev_triple(const Projection& p, const SectorPartition& regions);

/// psi -> u conj(psi).
struct AntiUnitary {
  arma::cx_mat unitary;
  arma::cx_mat conjugate(const arma::cx_mat& a) const { return unitary * arma::conj(a) * unitary.t(); }
};

struct Mod2Report {
  int bit = 0;
  long kernel = 0;
  IndexReport counts;
  /// Filled when a conserved spin is supplied: Index(P+ F P+) and whether its parity matches bit.
  std::optional<long> spin_index;
  std::optional<bool> reduction_agrees;
};

/// dim_C Ker(P F P) mod 2 with the same threshold rule as fredholm_index. `spin`, if given, is
/// a Hermitian involution commuting with P; its +1 sector yields the per-spin reduction.
Mod2Report mod2_index(const Projection& p, const AntiUnitary& time_reversal, const FredholmOptions& opt = {},
                      const arma::cx_mat* spin = nullptr);

struct ZetaPoint {
  double s = 0.0;
  double lattice = 0.0;
  double closed_form = 0.0;
  double rel_dev = 0.0;
};

struct ResidueReport {
  int dim = 0;
  double weight = 0.0;
  double spacing = 0.0;
  double radius = 0.0;
  std::vector<ZetaPoint> points;
  double residue_estimate = 0.0;
  double residue_expected = 0.0;
  double residue_rel_dev = 0.0;
};

struct ResidueOptions {
  double spacing = 0.25;
  double radius = 40.0;
  std::vector<double> offsets{0.4, 0.3, 0.2, 0.1};
};

double unit_sphere_area(int d);

/// zeta(s) = weight * sum_x a^d (1+|x|^2)^{-s/2} against the Gamma-function closed form, and the
/// residue at s = d from a polynomial extrapolation of (s-d) zeta(s).
ResidueReport residue_check(int d, std::span<const double> s_list, double weight, const ResidueOptions& opt = {});

struct KernelTerm {
  Coord offset{0, 0, 0};
  std::complex<double> value;
};

/// Compactly supported convolution kernel f(u) on lattice offsets u.
struct CompactKernel {
  std::vector<KernelTerm> terms;
  int support_radius() const;
};

struct HsReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double c_s = 0.0;
  double rel_dev = 0.0;
};

/// ||pi(f) (1+X^2)^{-s/4}||_2^2 against C_s sum_u a^d |f(u)|^2 on the box. `twist` adds the
/// magnetic phase exp(i twist (x1 y2 - x2 y1)) to the kernel (d >= 2).
HsReport hs_norm_check(const CompactKernel& f, const Grid& grid, double s, double twist = 0.0);

}  // namespace nctopo
