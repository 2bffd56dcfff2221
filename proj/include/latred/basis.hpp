#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <optional>
#include <vector>

#include "latred/errors.hpp"
#include "latred/numerics.hpp"

namespace latred {

using IntVector = std::vector<BigInt>;

/// Exact integer lattice basis; row i is the basis vector b_i. Rows are
/// rectangular and non-empty. Linear independence is checked by the
/// algorithms that need it, not on construction.
class Basis {
 public:
  Basis() = default;
  explicit Basis(std::vector<IntVector> rows) : rows_(std::move(rows)) { validate(); }
  Basis(std::initializer_list<std::initializer_list<long>> rows) {
    for (const auto& r : rows) {
      IntVector v;
      for (long x : r) v.emplace_back(x);
      rows_.push_back(std::move(v));
    }
    validate();
  }

  static Basis identity(std::size_t n) {
    std::vector<IntVector> rows(n, IntVector(n, 0));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1;
    return Basis(std::move(rows));
  }

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t ambient_dim() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  bool empty() const noexcept { return rows_.empty(); }

  const IntVector& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<IntVector>& rows() const noexcept { return rows_; }
  std::vector<IntVector>& mutable_rows() noexcept { return rows_; }

  /// Largest bit-length of any entry.
  std::size_t max_bits() const {
    std::size_t b = 0;
    for (const auto& r : rows_)
      for (const auto& x : r) b = std::max(b, mpz_sizeinbase(x.get_mpz_t(), 2));
    return b;
  }

  friend bool operator==(const Basis& a, const Basis& b) { return a.rows_ == b.rows_; }

 private:
  void validate() const {
    if (rows_.empty()) throw DimensionError("basis must contain at least one row");
    const std::size_t m = rows_.front().size();
    if (m == 0) throw DimensionError("basis rows must be non-empty");
    if (m < rows_.size()) throw DimensionError("basis has more rows than ambient dimension");
    for (std::size_t i = 1; i < rows_.size(); ++i)
      if (rows_[i].size() != m)
        throw DimensionError("row " + std::to_string(i + 1) + " has length " +
                             std::to_string(rows_[i].size()) + ", expected " + std::to_string(m));
  }

  std::vector<IntVector> rows_;
};

inline BigInt dot(const IntVector& a, const IntVector& b) {
  BigInt s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline BigInt norm_sq(const IntVector& a) { return dot(a, a); }

using IntMatrix = std::vector<IntVector>;

/// G[i][j] = <b_i, b_j>, exact.
inline IntMatrix gram(const Basis& b) {
  const std::size_t n = b.rank();
  IntMatrix g(n, IntVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      g[i][j] = dot(b[i], b[j]);
      g[j][i] = g[i][j];
    }
  return g;
}

namespace detail {

// Fraction-free Gaussian elimination (Bareiss) on a square matrix, in place.
// Returns the determinant; zero when singular.
inline BigInt bareiss_det(IntMatrix a) {
  const std::size_t n = a.size();
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && sgn(a[piv][k]) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign > 0 ? prev : BigInt(-prev);
}

}  // namespace detail

/// det(L). For square bases `value` is |det B| and `is_sqrt` is false; for
/// n < m `value` holds det(Gram) and det(L) = sqrt(value).
struct LatticeDet {
  BigInt value;
  bool is_sqrt = false;
};

inline LatticeDet det_lattice(const Basis& b) {
  LatticeDet d;
  if (b.rank() == b.ambient_dim()) {
    d.value = abs(detail::bareiss_det(b.rows()));
  } else {
    d.value = detail::bareiss_det(gram(b));
    d.is_sqrt = true;
  }
  if (sgn(d.value) == 0) throw SingularBasisError("basis rows are linearly dependent");
  return d;
}

/// ln det(L) at the requested precision.
inline MPFloat ln_det(const LatticeDet& d, PrecisionCtx ctx) {
  MPFloat l = ln_bigint(d.value, ctx.widened(16));
  if (d.is_sqrt) mpfr_div_ui(l.get(), l.get(), 2, MPFR_RNDN);
  return MPFloat(l, ctx);
}

/// (2/sqrt(pi)) * Gamma(1 + n/2)^(1/n) * det^(1/n).
inline MPFloat minkowski_bound(std::size_t n, const LatticeDet& det, PrecisionCtx ctx) {
  if (n == 0) throw DomainError("dimension must be positive");
  if (sgn(det.value) <= 0) throw DomainError("determinant must be positive");
  const PrecisionCtx w = ctx.widened(32);
  MPFloat arg(w);
  mpfr_set_ui(arg.get(), static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_div_ui(arg.get(), arg.get(), 2, MPFR_RNDN);
  mpfr_add_ui(arg.get(), arg.get(), 1, MPFR_RNDN);
  MPFloat lg = gamma_ln(arg, w);
  MPFloat ldet = ln_det(det, w);
  MPFloat s = lg + ldet;
  mpfr_div_ui(s.get(), s.get(), static_cast<unsigned long>(n), MPFR_RNDN);
  // ln 2 - ln(pi)/2
  MPFloat two(2.0, w);
  MPFloat c = mpf_log(two, w) - mpf_log(mpf_pi(w), w) / MPFloat(2.0, w);
  return MPFloat(mpf_exp(s + c, w), ctx);
}

inline MPFloat minkowski_bound(std::size_t n, const BigInt& det, PrecisionCtx ctx) {
  return minkowski_bound(n, LatticeDet{det, false}, ctx);
}

struct BoundReport {
  MPFloat minkowski_bound;
  MPFloat achieved_norm;
  MPFloat ratio;
  MPFloat target;
  bool met = false;
};

inline constexpr double kDefaultRatioTarget = 1.061;

/// Quality of b_1 against the Minkowski bound (Euclidean norm).
inline BoundReport approximation_ratio(const Basis& b, PrecisionCtx ctx,
                                       double target = kDefaultRatioTarget) {
  BoundReport r;
  r.minkowski_bound = minkowski_bound(b.rank(), det_lattice(b), ctx);
  r.achieved_norm = mpf_sqrt(mpf_from_bigint(norm_sq(b[0]), ctx.widened(32)), ctx);
  r.ratio = MPFloat(r.achieved_norm / r.minkowski_bound, ctx);
  r.target = MPFloat(target, ctx);
  r.met = r.ratio <= r.target;
  return r;
}

namespace detail {

// Solves x b = t for every row t of `targets` by fraction-free elimination
// of [b^T | targets^T] with row pivoting. Integrality is an exact
// divisibility test on the Cramer numerators. Empty result if some target
// is not an integer combination of the rows of b.
inline std::optional<std::vector<IntVector>> solve_in_lattice(const Basis& b, const Basis& targets) {
  const std::size_t n = b.rank();
  const std::size_t m = b.ambient_dim();
  const std::size_t t = targets.rank();
  if (targets.ambient_dim() != m) throw DimensionError("targets live in a different ambient space");
  IntMatrix a(m, IntVector(n + t));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < n; ++j) a[k][j] = b[j][k];
    for (std::size_t j = 0; j < t; ++j) a[k][n + j] = targets[j][k];
  }
  BigInt prev = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < m && sgn(a[piv][c]) == 0) ++piv;
    if (piv == m) throw SingularBasisError("basis rows are linearly dependent");
    std::swap(a[piv], a[c]);
    for (std::size_t i = c + 1; i < m; ++i) {
      for (std::size_t j = c + 1; j < n + t; ++j) {
        a[i][j] = a[i][j] * a[c][c] - a[i][c] * a[c][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[c][c];
  }
  // Rows below the rank must be consistent (zero right-hand side).
  for (std::size_t i = n; i < m; ++i)
    for (std::size_t j = n; j < n + t; ++j)
      if (sgn(a[i][j]) != 0) return std::nullopt;
  // `prev` is the leading n x n minor D; x_c * D is an integer for each c.
  const BigInt& det = prev;
  std::vector<IntVector> coords(t, IntVector(n));
  for (std::size_t j = 0; j < t; ++j) {
    IntVector num(n);
    for (std::size_t c = n; c-- > 0;) {
      BigInt s = a[c][n + j] * det;
      for (std::size_t l = c + 1; l < n; ++l) s -= a[c][l] * num[l];
      mpz_divexact(num[c].get_mpz_t(), s.get_mpz_t(), a[c][c].get_mpz_t());
      if (!mpz_divisible_p(num[c].get_mpz_t(), det.get_mpz_t())) return std::nullopt;
      mpz_divexact(coords[j][c].get_mpz_t(), num[c].get_mpz_t(), det.get_mpz_t());
    }
  }
  return coords;
}

inline bool rows_in_lattice(const Basis& b, const Basis& targets) {
  return solve_in_lattice(b, targets).has_value();
}

}  // namespace detail

/// Integer coordinates x with sum x_i b_i = v, or nothing if v is not in L(b).
inline std::optional<IntVector> lattice_coordinates(const Basis& b, const IntVector& v) {
  auto x = detail::solve_in_lattice(b, Basis(std::vector<IntVector>{v}));
  if (!x) return std::nullopt;
  return std::move(x->front());
}

/// True iff both bases generate the same lattice. Exact: equal covolume plus
/// containment of the first basis in the lattice of the second.
inline bool same_lattice(const Basis& a, const Basis& b) {
  if (a.rank() != b.rank() || a.ambient_dim() != b.ambient_dim())
    throw DimensionError("bases have different shapes");
  if (det_lattice(a).value != det_lattice(b).value) return false;
  // Solve against whichever basis has smaller entries; cheaper elimination.
  return a.max_bits() < b.max_bits() ? detail::rows_in_lattice(a, b)
                                     : detail::rows_in_lattice(b, a);
}

}  // namespace latred
