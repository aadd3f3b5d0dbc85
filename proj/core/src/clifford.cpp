#include "nctopo/clifford.hpp"

#include <bit>
#include <stdexcept>

namespace nctopo {

ExactMatrix ExactMatrix::identity(std::size_t n) { return scalar(n, {1, 0}); }

ExactMatrix ExactMatrix::scalar(std::size_t n, GaussInt z) {
  ExactMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = z;
  return m;
}

ExactMatrix ExactMatrix::adjoint() const {
  ExactMatrix m(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) m(c, r) = (*this)(r, c).conj();
  return m;
}

GaussInt ExactMatrix::trace() const {
  GaussInt t;
  for (std::size_t i = 0; i < n_; ++i) t = t + (*this)(i, i);
  return t;
}

bool ExactMatrix::is_zero() const {
  for (auto z : a_)
    if (z != GaussInt{}) return false;
  return true;
}

ExactMatrix ExactMatrix::kron(const ExactMatrix& rhs) const {
  const std::size_t m = rhs.n_;
  ExactMatrix out(n_ * m);
  for (std::size_t r1 = 0; r1 < n_; ++r1)
    for (std::size_t c1 = 0; c1 < n_; ++c1)
      for (std::size_t r2 = 0; r2 < m; ++r2)
        for (std::size_t c2 = 0; c2 < m; ++c2)
          out(r1 * m + r2, c1 * m + c2) = (*this)(r1, c1) * rhs(r2, c2);
  return out;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("ExactMatrix: size mismatch");
  ExactMatrix out(a.n_);
  for (std::size_t r = 0; r < a.n_; ++r)
    for (std::size_t k = 0; k < a.n_; ++k) {
      const GaussInt x = a(r, k);
      if (x == GaussInt{}) continue;
      for (std::size_t c = 0; c < a.n_; ++c) out(r, c) = out(r, c) + x * b(k, c);
    }
  return out;
}

ExactMatrix operator+(const ExactMatrix& a, const ExactMatrix& b) {
  ExactMatrix out = a;
  for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] + b.a_[i];
  return out;
}

ExactMatrix operator-(const ExactMatrix& a, const ExactMatrix& b) {
  ExactMatrix out = a;
  for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] - b.a_[i];
  return out;
}

ExactMatrix operator*(GaussInt z, const ExactMatrix& a) {
  ExactMatrix out = a;
  for (auto& x : out.a_) x = z * x;
  return out;
}

namespace {

ExactMatrix pauli(int which) {
  ExactMatrix m(2);
  switch (which) {
    case 0: m(0, 0) = {1, 0}; m(1, 1) = {1, 0}; break;
    case 1: m(0, 1) = {1, 0}; m(1, 0) = {1, 0}; break;
    case 2: m(0, 1) = {0, -1}; m(1, 0) = {0, 1}; break;
    case 3: m(0, 0) = {1, 0}; m(1, 1) = {-1, 0}; break;
    default: throw std::logic_error("pauli index");
  }
  return m;
}

GaussInt ipow(GaussInt z, int k) {
  GaussInt r{1, 0};
  for (int i = 0; i < k; ++i) r = r * z;
  return r;
}

ExactMatrix ordered_product(const std::vector<ExactMatrix>& g, std::size_t count) {
  ExactMatrix p = ExactMatrix::identity(g.front().size());
  for (std::size_t j = 0; j < count; ++j) p = p * g[j];
  return p;
}

ExactMatrix even_grading(const std::vector<ExactMatrix>& g) {
  const int half = int(g.size()) / 2;
  return ipow({0, -1}, half) * ordered_product(g, g.size());
}

// Even-dimensional Pauli tower: from (g_1..g_{2m}, Gamma) build
// (g_k x sx, Gamma x sx, 1 x sy) for 2m+2 generators.
std::vector<ExactMatrix> even_spinor(int d) {
  std::vector<ExactMatrix> g{pauli(1), pauli(2)};
  for (int m = 2; m < d; m += 2) {
    const ExactMatrix grade = even_grading(g);
    std::vector<ExactMatrix> next;
    for (const auto& x : g) next.push_back(x.kron(pauli(1)));
    next.push_back(grade.kron(pauli(1)));
    next.push_back(ExactMatrix::identity(grade.size()).kron(pauli(2)));
    g = std::move(next);
  }
  return g;
}

CliffordRep spinor_rep(int d) {
  CliffordRep rep;
  rep.dim = d;
  rep.kind = CliffordKind::spinor;
  if (d == 1) {
    // One-dimensional irrep with the sign fixed by the trace normalization.
    ExactMatrix g(1);
    g(0, 0) = odd_spinor_trace(1);
    rep.gammas.push_back(g);
    return rep;
  }
  const int even = d % 2 == 0 ? d : d - 1;
  rep.gammas = even_spinor(even);
  const ExactMatrix grade = even_grading(rep.gammas);
  if (d % 2 == 0) {
    rep.grading = grade;
    return rep;
  }
  // Odd d: the last generator is +-grade; pick the irrep matching the trace normalization.
  rep.gammas.push_back(grade);
  if (ordered_product(rep.gammas, rep.gammas.size()).trace() != odd_spinor_trace(d))
    rep.gammas.back() = GaussInt{-1, 0} * grade;
  if (ordered_product(rep.gammas, rep.gammas.size()).trace() != odd_spinor_trace(d))
    throw std::logic_error("spinor trace normalization unreachable");
  return rep;
}

// Basis of Lambda^* R^d indexed by subset bitmask. wedge and contraction by e_j carry
// the sign (-1)^{#{k in S : k < j}}.
CliffordRep exterior_rep(int d) {
  CliffordRep rep;
  rep.dim = d;
  rep.kind = CliffordKind::exterior;
  const std::size_t n = std::size_t{1} << d;
  for (int j = 0; j < d; ++j) {
    ExactMatrix wedge(n), contract(n);
    const unsigned bit = 1u << j;
    for (unsigned s = 0; s < n; ++s) {
      const int before = std::popcount(s & (bit - 1));
      const GaussInt sign{before % 2 == 0 ? 1 : -1, 0};
      if (s & bit)
        contract(s ^ bit, s) = sign;
      else
        wedge(s | bit, s) = sign;
    }
    rep.gammas.push_back(wedge + contract);
    rep.rhos.push_back(wedge - contract);
  }
  ExactMatrix parity(n);
  for (unsigned s = 0; s < n; ++s) parity(s, s) = {std::popcount(s) % 2 == 0 ? 1 : -1, 0};
  rep.grading = parity;
  return rep;
}

bool anticommute(const ExactMatrix& a, const ExactMatrix& b) { return (a * b + b * a).is_zero(); }

}  // namespace

GaussInt odd_spinor_trace(int d) {
  if (d < 1 || d % 2 == 0) throw std::invalid_argument("odd_spinor_trace: d must be odd and positive");
  const int n = (d - 1) / 2;
  const GaussInt sign{n % 2 == 0 ? -1 : 1, 0};
  // i^{-n} = (-i)^n
  return sign * ipow({0, -1}, n) * GaussInt{1L << n, 0};
}

CliffordRep make_clifford(int d, CliffordKind kind) {
  if (d < 1 || d > 4) throw std::out_of_range("make_clifford: dimension must be in 1..4");
  return kind == CliffordKind::spinor ? spinor_rep(d) : exterior_rep(d);
}

AbsIndexValue abs_index(int symmetry_degree, int d, KernelDims dims) {
  if (dims.ker < 0 || dims.coker < 0) throw std::invalid_argument("abs_index: negative kernel dimension");
  const int row = ((symmetry_degree - d) % 8 + 8) % 8;
  switch (row) {
    case 0: return {AbsGroup::Z, dims.ker - dims.coker};
    case 1:
    case 2: return {AbsGroup::Z2, dims.ker % 2};
    case 4:
      if (dims.ker % 2 != 0 || dims.coker % 2 != 0)
        throw std::domain_error("abs_index: quaternionic kernel with odd complex dimension");
      return {AbsGroup::Z, (dims.ker - dims.coker) / 2};
    default: return {AbsGroup::trivial, 0};
  }
}

std::vector<RelationCheck> clifford_selftest() {
  std::vector<RelationCheck> out;
  auto record = [&](std::string name, bool ok) { out.push_back({std::move(name), ok}); };

  for (int d = 1; d <= 4; ++d) {
    for (auto kind : {CliffordKind::spinor, CliffordKind::exterior}) {
      const auto rep = make_clifford(d, kind);
      const std::string tag = to_string(kind) + " d=" + std::to_string(d);
      const std::size_t n = rep.fiber();
      const auto id = ExactMatrix::identity(n);

      bool square = true, selfadj = true, anti = true;
      for (std::size_t j = 0; j < rep.gammas.size(); ++j) {
        const auto& g = rep.gammas[j];
        square = square && g * g == id;
        selfadj = selfadj && g.adjoint() == g;
        for (std::size_t k = j + 1; k < rep.gammas.size(); ++k)
          anti = anti && anticommute(g, rep.gammas[k]);
      }
      record(tag + " gamma squares", square);
      record(tag + " gamma self-adjoint", selfadj);
      record(tag + " gamma anticommute", anti);

      if (kind == CliffordKind::exterior) {
        bool rsq = true, rskew = true, ranti = true;
        const auto minus_id = ExactMatrix::scalar(n, {-1, 0});
        for (std::size_t j = 0; j < rep.rhos.size(); ++j) {
          const auto& r = rep.rhos[j];
          rsq = rsq && r * r == minus_id;
          rskew = rskew && r.adjoint() == GaussInt{-1, 0} * r;
          for (std::size_t k = 0; k < rep.rhos.size(); ++k) {
            if (k != j) ranti = ranti && anticommute(r, rep.rhos[k]);
            ranti = ranti && anticommute(r, rep.gammas[k]);
          }
        }
        record(tag + " rho squares to -1", rsq);
        record(tag + " rho skew-adjoint", rskew);
        record(tag + " rho anticommutes with rho and gamma", ranti);
        continue;
      }

      record(tag + " fiber dimension", n == (std::size_t{1} << (d / 2)));
      if (d % 2 == 1) {
        record(tag + " odd spinor trace",
               ordered_product(rep.gammas, rep.gammas.size()).trace() == odd_spinor_trace(d));
      } else {
        const auto& grade = *rep.grading;
        bool ganti = true;
        for (const auto& g : rep.gammas) ganti = ganti && anticommute(grade, g);
        record(tag + " grading involution", grade * grade == id && grade.adjoint() == grade);
        record(tag + " grading anticommutes", ganti);
        record(tag + " grading traceless", grade.trace() == GaussInt{});
      }
      // every product of 0 < k < d distinct generators is traceless
      bool traceless = true;
      for (unsigned mask = 1; mask + 1 < (1u << d); ++mask) {
        ExactMatrix p = id;
        for (int j = 0; j < d; ++j)
          if (mask & (1u << j)) p = p * rep.gammas[j];
        traceless = traceless && p.trace() == GaussInt{};
      }
      record(tag + " partial products traceless", traceless);
    }
  }
  return out;
}

std::string to_string(AbsGroup g) {
  switch (g) {
    case AbsGroup::Z: return "Z";
    case AbsGroup::Z2: return "Z2";
    case AbsGroup::trivial: return "trivial";
  }
  return "?";
}

std::string to_string(CliffordKind k) { return k == CliffordKind::spinor ? "spinor" : "exterior"; }

}  // namespace nctopo
