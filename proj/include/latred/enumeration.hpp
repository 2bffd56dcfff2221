#pragma once

// Exact shortest-vector enumeration (Fincke-Pohst interval recursion with
// Schnorr-Euchner zig-zag ordering) over an upper-triangular R block, plus a
// brute-force box search used as an independent oracle.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "latred/basis.hpp"
#include "latred/errors.hpp"
#include "latred/numerics.hpp"
#include "latred/qr.hpp"

namespace latred {

enum class EnumOrder { ZigZag, Ascending };

struct EnumRequest {
  RFactor r_block;
  MPFloat radius_sq;
  PrecisionCtx ctx = PrecisionCtx::double_precision();
  std::optional<std::uint64_t> node_budget;
  EnumOrder order = EnumOrder::ZigZag;
};

struct EnumResult {
  IntVector coeffs;
  MPFloat norm_sq;
  std::uint64_t nodes_visited = 0;
  /// Filled by the brute-force oracle and by verify_exact().
  std::optional<BigInt> exact_norm_sq;
};

/// Node budget exhausted; carries the best vector found so far, if any.
class EnumBudgetExceeded : public Error {
 public:
  EnumBudgetExceeded(const std::string& what, std::optional<EnumResult> best)
      : Error(what), best_(std::move(best)) {}
  const std::optional<EnumResult>& best() const noexcept { return best_; }

 private:
  std::optional<EnumResult> best_;
};

/// Diagonal block [k, k+len) of R as a standalone R factor.
inline RFactor r_submatrix(const RFactor& r, std::size_t k, std::size_t len) {
  if (k + len > r.size()) throw DimensionError("block exceeds R factor");
  RFactor out(len, r.ctx());
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = i; j < len; ++j) mpfr_set(out(i, j).get(), r(k + i, k + j).get(), MPFR_RNDN);
  return out;
}

namespace detail {

inline double real_round(double x) { return std::round(x); }
inline MPFloat real_round(const MPFloat& x) {
  MPFloat r(x);
  mpfr_round(r.get(), x.get());
  return r;
}
inline long real_to_long(double x) { return static_cast<long>(x); }
inline long real_to_long(const MPFloat& x) { return mpfr_get_si(x.get(), MPFR_RNDN); }
inline double real_sqrt(double x) { return std::sqrt(x); }
inline MPFloat real_sqrt(const MPFloat& x) { return x.sign() <= 0 ? MPFloat(x.ctx()) : mpf_sqrt(x, x.ctx()); }
inline double real_floor(double x) { return std::floor(x); }
inline MPFloat real_floor(const MPFloat& x) {
  MPFloat r(x);
  mpfr_floor(r.get(), x.get());
  return r;
}
inline double real_ceil(double x) { return std::ceil(x); }
inline MPFloat real_ceil(const MPFloat& x) {
  MPFloat r(x);
  mpfr_ceil(r.get(), x.get());
  return r;
}

// Orders coefficient vectors by the tie-break rule: lexicographic after
// normalizing the first nonzero entry to be positive.
template <class Int>
bool normalized_less(const std::vector<Int>& a, const std::vector<Int>& b) {
  auto sign_of = [](const std::vector<Int>& v) {
    for (const auto& x : v)
      if (x != 0) return x > 0 ? 1 : -1;
    return 1;
  };
  const int sa = sign_of(a), sb = sign_of(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Int x = a[i] * sa, y = b[i] * sb;
    if (x != y) return x < y;
  }
  return false;
}

template <class Int>
void normalize_sign(std::vector<Int>& v) {
  for (const auto& x : v)
    if (x != 0) {
      if (x < 0)
        for (auto& y : v) y = -y;
      return;
    }
}

// Depth-first enumeration over integer coefficients u with
// ||R u||^2 = sum_i r_ii^2 (u_i - c_i)^2, c_i = -sum_{j>i} mu_ij u_j.
// Only vectors whose last nonzero coefficient is positive are visited.
template <class Real>
class FinckePohst {
 public:
  FinckePohst(const std::vector<std::vector<Real>>& r, Real radius_sq, Real tie_eps,
              std::optional<std::uint64_t> budget, EnumOrder order)
      : n_(r.size()), radius_(radius_sq), eps_(tie_eps), budget_(budget), order_(order) {
    mu_.assign(n_, std::vector<Real>(n_, lit(0)));
    rsq_.assign(n_, lit(0));
    for (std::size_t i = 0; i < n_; ++i) {
      if (!(r[i][i] > lit(0))) throw DomainError("R block must have a positive diagonal");
      rsq_[i] = r[i][i] * r[i][i];
      for (std::size_t j = i + 1; j < n_; ++j) mu_[i][j] = r[i][j] / r[i][i];
    }
    u_.assign(n_, 0);
    best_ = radius_sq;
    lower_ = radius_sq;
    upper_ = radius_sq;
  }

  bool run() {
    if (n_ == 0) return false;
    search(n_ - 1, lit(0), true);
    return found_;
  }

  const std::vector<long>& best_coeffs() const { return best_u_; }
  const Real& best_norm() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  Real lit(double x) const {
    if constexpr (std::is_same_v<Real, double>)
      return x;
    else
      return Real(x, radius_.ctx());
  }

  bool admissible(const Real& v) const { return found_ ? v <= upper_ : v < radius_; }

  Real bound() const { return found_ ? upper_ : radius_; }

  void visit(std::size_t i, long x, const Real& val, bool above_zero) {
    if (budget_ && nodes_ >= *budget_) throw BudgetSignal{};
    ++nodes_;
    u_[i] = x;
    if (i == 0) {
      leaf(val);
    } else {
      search(i - 1, val, above_zero && x == 0);
    }
  }

  void leaf(const Real& val) {
    if (!found_) {
      if (val < radius_) accept(val);
      return;
    }
    if (val < lower_) {
      accept(val);
    } else if (val <= upper_) {
      if (normalized_less(u_, best_u_)) accept(val < best_ ? val : best_);
    }
  }

  void accept(const Real& val) {
    found_ = true;
    best_ = val;
    best_u_ = u_;
    lower_ = best_ * (lit(1) - eps_);
    upper_ = best_ * (lit(1) + eps_);
  }

  void search(std::size_t i, const Real& partial, bool above_zero) {
    if (above_zero) {
      // Center is zero; only non-negative values (positive at the bottom).
      for (long x = i == 0 ? 1 : 0;; ++x) {
        Real d = lit(static_cast<double>(x));
        Real val = partial + rsq_[i] * d * d;
        if (!admissible(val)) break;
        visit(i, x, val, true);
      }
      u_[i] = 0;
      return;
    }
    Real c = lit(0);
    for (std::size_t j = i + 1; j < n_; ++j)
      if (u_[j] != 0) c = c - mu_[i][j] * lit(static_cast<double>(u_[j]));
    if (order_ == EnumOrder::Ascending) {
      Real slack = (bound() - partial) / rsq_[i];
      if (slack < lit(0)) return;
      Real w = real_sqrt(slack);
      long lo = real_to_long(real_ceil(c - w)), hi = real_to_long(real_floor(c + w));
      for (long x = lo; x <= hi; ++x) {
        Real d = lit(static_cast<double>(x)) - c;
        Real val = partial + rsq_[i] * d * d;
        if (admissible(val)) visit(i, x, val, false);
      }
      u_[i] = 0;
      return;
    }
    const long x0 = real_to_long(real_round(c));
    const long s = (c >= lit(static_cast<double>(x0))) ? 1 : -1;
    for (long step = 0;; ++step) {
      // x0, x0+s, x0-s, x0+2s, x0-2s, ... has non-decreasing |x - c|.
      const long off = (step + 1) / 2;
      const long x = step % 2 ? x0 + s * off : x0 - s * off;
      Real d = lit(static_cast<double>(x)) - c;
      Real val = partial + rsq_[i] * d * d;
      if (!admissible(val)) break;
      visit(i, x, val, false);
    }
    u_[i] = 0;
  }

 public:
  struct BudgetSignal {};

 private:
  std::size_t n_;
  std::vector<std::vector<Real>> mu_;
  std::vector<Real> rsq_;
  Real radius_;
  Real eps_;
  std::optional<std::uint64_t> budget_;
  EnumOrder order_;
  std::vector<long> u_;
  std::vector<long> best_u_;
  Real best_;
  Real lower_;
  Real upper_;
  bool found_ = false;
  std::uint64_t nodes_ = 0;
};

template <class Real>
std::optional<EnumResult> enumerate_impl(const std::vector<std::vector<Real>>& r, Real radius_sq,
                                         Real tie_eps, PrecisionCtx ctx,
                                         std::optional<std::uint64_t> budget, EnumOrder order,
                                         std::uint64_t* nodes_out = nullptr) {
  FinckePohst<Real> fp(r, radius_sq, tie_eps, budget, order);
  auto pack = [&](bool found) -> std::optional<EnumResult> {
    if (nodes_out) *nodes_out = fp.nodes();
    if (!found) return std::nullopt;
    EnumResult res;
    std::vector<long> u = fp.best_coeffs();
    normalize_sign(u);
    for (long x : u) res.coeffs.emplace_back(x);
    res.norm_sq = MPFloat(fp.best_norm(), ctx);
    res.nodes_visited = fp.nodes();
    return res;
  };
  try {
    return pack(fp.run());
  } catch (const typename FinckePohst<Real>::BudgetSignal&) {
    bool found = !fp.best_coeffs().empty();
    throw EnumBudgetExceeded("enumeration node budget exhausted", pack(found));
  }
}

// Relative tolerance under which two squared norms count as a tie.
inline double tie_tolerance(PrecisionCtx ctx) { return std::ldexp(1.0, -static_cast<int>(ctx.bits() / 2)); }

}  // namespace detail

/// Exact minimum of ||R'u||^2 over nonzero integer u with ||R'u||^2 <
/// radius_sq; ties go to the lexicographically smallest u whose first
/// nonzero entry is positive. Runs in double when ctx <= 53 bits, otherwise
/// in MPFR at ctx precision.
inline std::optional<EnumResult> enumerate_shortest(const EnumRequest& req) {
  if (req.radius_sq.sign() <= 0) throw DomainError("enumeration radius must be positive");
  const std::size_t n = req.r_block.size();
  if (n == 0) throw DimensionError("empty enumeration block");
  if (req.ctx.bits() <= 53) {
    std::vector<std::vector<double>> r = req.r_block.block_as_double(0, n);
    return detail::enumerate_impl<double>(r, req.radius_sq.to_double(), detail::tie_tolerance(req.ctx),
                                          req.ctx, req.node_budget, req.order);
  }
  std::vector<std::vector<MPFloat>> r(n, std::vector<MPFloat>(n, MPFloat(req.ctx)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r[i][j] = MPFloat(req.r_block(i, j), req.ctx);
  MPFloat eps(std::ldexp(1.0, -static_cast<int>(std::min<long>(req.ctx.bits() / 2, 1000))), req.ctx);
  return detail::enumerate_impl<MPFloat>(r, MPFloat(req.radius_sq, req.ctx), eps, req.ctx,
                                         req.node_budget, req.order);
}

/// Double-precision block enumeration used by BKZ.
/// `nodes` receives the node count whether or not a vector is found.
inline std::optional<EnumResult> enumerate_block(const std::vector<std::vector<double>>& r, double radius_sq,
                                                 std::optional<std::uint64_t> budget, std::uint64_t& nodes) {
  const PrecisionCtx ctx = PrecisionCtx::double_precision();
  return detail::enumerate_impl<double>(r, radius_sq, detail::tie_tolerance(ctx), ctx, budget,
                                        EnumOrder::ZigZag, &nodes);
}

/// Lattice vector sum_j u_j b_{k+j}.
inline IntVector combine(const Basis& b, std::size_t k, const IntVector& u) {
  IntVector v(b.ambient_dim(), 0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (sgn(u[j]) == 0) continue;
    for (std::size_t l = 0; l < v.size(); ++l) v[l] += u[j] * b[k + j][l];
  }
  return v;
}

/// Recomputes the squared norm of the result exactly from the basis rows
/// [k, k + |u|) and stores it in exact_norm_sq.
inline BigInt verify_exact(EnumResult& res, const Basis& b, std::size_t k = 0) {
  BigInt exact = norm_sq(combine(b, k, res.coeffs));
  res.exact_norm_sq = exact;
  return exact;
}

inline constexpr std::uint64_t kBruteForceMaxPoints = 1'000'000'000ull;

/// Exact minimum of ||sum u_i b_i||^2 over nonzero u in
/// [-coeff_bound, coeff_bound]^n, integer arithmetic throughout. Same
/// tie-break rule as enumerate_shortest.
inline EnumResult brute_force_shortest(const Basis& b, long coeff_bound) {
  if (coeff_bound <= 0) throw DomainError("coefficient bound must be positive");
  const std::size_t n = b.rank(), m = b.ambient_dim();
  long double points = std::pow(static_cast<long double>(2 * coeff_bound + 1), static_cast<long double>(n));
  if (points > static_cast<long double>(kBruteForceMaxPoints))
    throw DomainError("brute-force box exceeds 1e9 points");

  // int64 path when every partial sum and square provably fits.
  long double max_abs = 0;
  for (const auto& row : b.rows())
    for (const auto& x : row) max_abs = std::max(max_abs, static_cast<long double>(std::fabs(x.get_d())));
  const long double worst = max_abs * static_cast<long double>(coeff_bound) * static_cast<long double>(n);
  const bool small = worst * worst * static_cast<long double>(m) < 0x1p62L && max_abs < 0x1p40L;

  EnumResult res;
  std::vector<long> u(n, -coeff_bound), best_u;
  std::uint64_t visited = 0;
  if (small) {
    std::vector<std::vector<std::int64_t>> rows(n, std::vector<std::int64_t>(m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < m; ++l) rows[i][l] = b[i][l].get_si();
    std::vector<std::int64_t> v(m, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < m; ++l) v[l] -= coeff_bound * rows[i][l];
    std::int64_t best = -1;
    for (;;) {
      ++visited;
      std::int64_t s = 0;
      for (std::size_t l = 0; l < m; ++l) s += v[l] * v[l];
      if (s > 0 && (best < 0 || s < best || (s == best && detail::normalized_less(u, best_u)))) {
        best = s;
        best_u = u;
      }
      std::size_t pos = n;
      while (pos-- > 0) {
        if (u[pos] < coeff_bound) {
          ++u[pos];
          for (std::size_t l = 0; l < m; ++l) v[l] += rows[pos][l];
          break;
        }
        u[pos] = -coeff_bound;
        for (std::size_t l = 0; l < m; ++l) v[l] -= 2 * coeff_bound * rows[pos][l];
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
    res.exact_norm_sq = BigInt(static_cast<long>(best));
  } else {
    IntVector v(m, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < m; ++l) v[l] -= coeff_bound * b[i][l];
    std::optional<BigInt> best;
    for (;;) {
      ++visited;
      BigInt s = norm_sq(v);
      if (sgn(s) > 0 && (!best || s < *best || (s == *best && detail::normalized_less(u, best_u)))) {
        best = s;
        best_u = u;
      }
      std::size_t pos = n;
      while (pos-- > 0) {
        if (u[pos] < coeff_bound) {
          ++u[pos];
          for (std::size_t l = 0; l < m; ++l) v[l] += b[pos][l];
          break;
        }
        u[pos] = -coeff_bound;
        for (std::size_t l = 0; l < m; ++l) v[l] -= 2 * coeff_bound * b[pos][l];
      }
      if (pos == static_cast<std::size_t>(-1)) break;
    }
    res.exact_norm_sq = *best;
  }
  detail::normalize_sign(best_u);
  for (long x : best_u) res.coeffs.emplace_back(x);
  const long bits = std::max<long>(static_cast<long>(mpz_sizeinbase(res.exact_norm_sq->get_mpz_t(), 2)),
                                   PrecisionCtx::kMinBits);
  res.norm_sq = mpf_from_bigint(*res.exact_norm_sq, PrecisionCtx(bits));
  res.nodes_visited = visited;
  return res;
}

}  // namespace latred
