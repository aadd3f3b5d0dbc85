#pragma once

#include <armadillo>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "nctopo/lattice_model.hpp"

namespace nctopo {

struct SpectralData {
  arma::vec eigenvalues;  ///< ascending
  arma::cx_mat eigenvectors;
  std::uint64_t source_hash = 0;
  Grid grid;

  double width() const { return eigenvalues.is_empty() ? 0.0 : eigenvalues.max() - eigenvalues.min(); }
  /// Q f(Lambda) Q^*.
  arma::cx_mat apply(const std::function<std::complex<double>(double)>& f) const;
  arma::cx_mat reconstruct() const;
};

/// Full dense Hermitian eigendecomposition. Throws std::invalid_argument on
/// non-Hermitian input.
SpectralData diagonalize(const OperatorKernel& h, std::uint64_t source_hash = 0);

/// One file per source hash under `dir`; see docs/cache_format.md for the layout.
/// Concurrent loads are allowed; stores are serialized.
class EigenCache {
 public:
  explicit EigenCache(std::filesystem::path dir);

  std::optional<SpectralData> load(std::uint64_t source_hash, const Grid& grid) const;
  void store(const SpectralData& sd) const;
  SpectralData get_or_compute(const OperatorKernel& h, std::uint64_t source_hash) const;

  std::filesystem::path path_for(std::uint64_t source_hash) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
};

struct Projection {
  arma::cx_mat matrix;
  /// Orthonormal basis of the range (the occupied eigenvectors).
  arma::cx_mat basis;
  double mu = 0.0;
  long rank = 0;
  /// Distance from mu to the nearest eigenvalue.
  double gap_distance = 0.0;
  bool near_degenerate = false;
  Grid grid;
};

/// P = sum over eigenvalues <= mu. near_degenerate is set when mu lies within
/// gap_tolerance * (spectral width) of an eigenvalue.
Projection fermi_projection(const SpectralData& sd, double mu, double gap_tolerance = 1e-6);

/// Projection from an explicit orthonormal basis (columns).
Projection projection_from_basis(const arma::cx_mat& basis, const Grid& grid);

/// Off-diagonal block of sgn(H) between the chiral sectors. Columns live on the R_c = +1
/// sector, rows on R_c = -1; row_site/col_site give the lattice site of each basis vector.
struct ChiralUnitary {
  arma::cx_mat matrix;
  Grid grid;
  std::vector<std::size_t> row_site;
  std::vector<std::size_t> col_site;

  /// Unitary acting on the full grid with identical row and column sites.
  static ChiralUnitary on_grid(arma::cx_mat u, const Grid& grid);
};

/// R_c must be diagonal with entries +-1 in the lattice basis and anticommute with H.
ChiralUnitary fermi_unitary(const SpectralData& sd, const arma::cx_mat& chiral, bool mobility_gap = false,
                            double gap_tolerance = 1e-8);

enum class SwitchKind { exp, ind };

/// Quintic smoothstep switch: exp kind goes 0 -> 1 across [center - half_width, center + half_width],
/// ind kind goes -1 -> +1 and is odd about the center.
class SwitchFunction {
 public:
  SwitchFunction(SwitchKind kind, double center, double half_width);
  double operator()(double x) const;
  double lower() const { return center_ - half_width_; }
  double upper() const { return center_ + half_width_; }
  SwitchKind kind() const { return kind_; }

 private:
  SwitchKind kind_;
  double center_;
  double half_width_;
};

SwitchFunction switch_function(SwitchKind kind, double center, double half_width);

}  // namespace nctopo
