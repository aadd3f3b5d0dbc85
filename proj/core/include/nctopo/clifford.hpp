#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nctopo {

/// Gaussian integer a + b i. All Clifford generators used here have entries in Z[i],
/// so relations can be checked with exact equality.
struct GaussInt {
  long re = 0;
  long im = 0;

  friend constexpr GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
  friend constexpr GaussInt operator-(GaussInt a, GaussInt b) { return {a.re - b.re, a.im - b.im}; }
  friend constexpr GaussInt operator-(GaussInt a) { return {-a.re, -a.im}; }
  friend constexpr GaussInt operator*(GaussInt a, GaussInt b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend constexpr bool operator==(GaussInt, GaussInt) = default;

  constexpr GaussInt conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {double(re), double(im)}; }
};

inline constexpr GaussInt unit_i{0, 1};

/// Square matrix over Z[i], row-major.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  explicit ExactMatrix(std::size_t n) : n_(n), a_(n * n) {}

  static ExactMatrix identity(std::size_t n);
  static ExactMatrix scalar(std::size_t n, GaussInt z);

  std::size_t size() const { return n_; }
  GaussInt& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  GaussInt operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

  ExactMatrix adjoint() const;
  GaussInt trace() const;
  bool is_zero() const;
  ExactMatrix kron(const ExactMatrix& rhs) const;

  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  friend ExactMatrix operator+(const ExactMatrix& a, const ExactMatrix& b);
  friend ExactMatrix operator-(const ExactMatrix& a, const ExactMatrix& b);
  friend ExactMatrix operator*(GaussInt z, const ExactMatrix& a);
  friend bool operator==(const ExactMatrix&, const ExactMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<GaussInt> a_;
};

enum class CliffordKind { spinor, exterior };

/// Concrete generators. gammas square to +1 and are self-adjoint (Cl_{d,0});
/// rhos (exterior kind only) square to -1 and are skew-adjoint (Cl_{0,d}).
struct CliffordRep {
  int dim = 0;
  CliffordKind kind = CliffordKind::spinor;
  std::vector<ExactMatrix> gammas;
  std::vector<ExactMatrix> rhos;
  /// Spinor, even d: (-i)^{d/2} gamma^1...gamma^d. Exterior: form-degree parity.
  std::optional<ExactMatrix> grading;

  std::size_t fiber() const { return gammas.empty() ? 0 : gammas.front().size(); }
};

/// Tr(gamma^1 ... gamma^{2n+1}) = (-1)^{n+1} i^{-n} 2^n.
GaussInt odd_spinor_trace(int d);

CliffordRep make_clifford(int d, CliffordKind kind);

enum class AbsGroup { Z, Z2, trivial };

struct AbsIndexValue {
  AbsGroup group = AbsGroup::trivial;
  long value = 0;
};

/// Kernel dimensions of T_+ and T_+^*. Their field (R, C) follows the table row:
/// rows 0 and 1 expect real dimensions, rows 2 and 4 complex dimensions.
struct KernelDims {
  long ker = 0;
  long coker = 0;
};

AbsIndexValue abs_index(int symmetry_degree, int d, KernelDims dims);

struct RelationCheck {
  std::string name;
  bool passed = false;
};

/// Exhaustive relation report for d = 1..4, both kinds.
std::vector<RelationCheck> clifford_selftest();

std::string to_string(AbsGroup g);
std::string to_string(CliffordKind k);

}  // namespace nctopo
