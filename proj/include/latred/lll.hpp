#pragma once

// LLL reduction driven by a Householder R factor that is recomputed from
// the exact integer basis whenever a basis vector changes.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latred/basis.hpp"
#include "latred/errors.hpp"
#include "latred/numerics.hpp"
#include "latred/profile.hpp"
#include "latred/qr.hpp"

namespace latred {

/// Thrown when an iteration cap is hit; carries the basis reached so far.
class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, Basis partial)
      : Error(what), partial_(std::move(partial)) {}
  const Basis& partial() const noexcept { return partial_; }

 private:
  Basis partial_;
};

inline void check_delta(double delta) {
  if (!(delta > 0.25 && delta <= 1.0))
    throw DomainError("delta must lie in (0.25, 1], got " + std::to_string(delta));
}

struct LLLParams {
  double delta = 0.99;
  PrecisionCtx ctx = PrecisionCtx::quad();
  std::optional<std::uint64_t> max_iterations;
};

struct LLLOutcome {
  Basis basis;
  RFactor r;
  std::uint64_t swaps = 0;
  std::uint64_t size_reductions = 0;
  StageProfile profile;
};

/// Default stage-visit cap: 10 n^2 (max bit-length) plus slack for tiny
/// inputs.
inline std::uint64_t default_iteration_cap(std::size_t n, std::size_t max_bits) {
  return 10ull * n * n * std::max<std::size_t>(max_bits, 1) + 100ull * n + 100;
}

namespace detail {

inline int mpfr_cmpabs_half(mpfr_srcptr x) {
  // Compare |x| against 1/2 without allocating.
  if (mpfr_zero_p(x)) return -1;
  const mpfr_exp_t e = mpfr_get_exp(x);  // x = f * 2^e, 1/2 <= |f| < 1
  if (e < 0) return -1;
  if (e > 0) return 1;
  // e == 0: |x| in [1/2, 1); equal to 1/2 iff it is a power of two.
  return mpfr_cmp_ui_2exp(x, 1, -1) == 0 || mpfr_cmp_si_2exp(x, -1, -1) == 0 ? 0 : 1;
}

// Incremental LLL state over a mutable list of integer rows. Positions
// [0, valid_) have up-to-date reflectors and R columns and form an
// LLL-reduced prefix.
class ReductionEngine {
 public:
  // Passes with unrestricted coefficients allowed per stage before the
  // coefficient bound 2^(bits-4) is enforced.
  static constexpr unsigned kCoarsePasses = 2;
  static constexpr unsigned kMaxPasses = 64;

  ReductionEngine(std::vector<IntVector>& rows, PrecisionCtx ctx, double delta, StageProfile& profile)
      : rows_(rows),
        ctx_(ctx),
        h_(rows.empty() ? 0 : rows.front().size(), ctx),
        delta_(delta, ctx),
        profile_(profile),
        x_(ctx),
        lhs_(ctx),
        rhs_(ctx) {
    check_delta(delta);
    cols_.resize(rows_.size());
  }

  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t valid() const noexcept { return valid_; }
  PrecisionCtx ctx() const noexcept { return ctx_; }

  std::uint64_t swaps() const noexcept { return swaps_; }
  std::uint64_t size_reductions() const noexcept { return size_reductions_; }
  std::uint64_t iterations() const noexcept { return iterations_; }

  void set_iteration_cap(std::uint64_t cap) { cap_ = cap; }

  // R entry (i, j), i <= j < valid().
  const MPFloat& r(std::size_t i, std::size_t j) const { return cols_[j][i]; }

  void insert_row(std::size_t k, IntVector v) {
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(k), std::move(v));
    cols_.insert(cols_.begin() + static_cast<std::ptrdiff_t>(k), std::vector<MPFloat>{});
    valid_ = std::min(valid_, k);
  }

  // LLL-reduces rows [0, end) assuming [0, start) is already reduced and
  // valid. With `purge`, exactly-zero vectors produced by dependencies are
  // deleted; returns how many were removed.
  std::size_t run(std::size_t start, std::size_t end, bool purge) {
    if (start > valid_) throw ConsistencyError("reduction restarted beyond the valid prefix");
    std::size_t removed = 0;
    std::size_t k = start;
    while (k < end) {
      if (++iterations_ > cap_)
        throw IterationLimitError("LLL iteration cap of " + std::to_string(cap_) + " exceeded",
                                  Basis(rows_));
      valid_ = std::min(valid_, k);
      if (!size_reduce_stage(k)) {
        if (!purge)
          throw SingularBasisError("basis vector " + std::to_string(k + 1) +
                                   " reduced to zero: rows are linearly dependent");
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(k));
        cols_.erase(cols_.begin() + static_cast<std::ptrdiff_t>(k));
        --end;
        ++removed;
        continue;
      }
      if (k > 0 && !lovasz_holds(k)) {
        std::swap(rows_[k - 1], rows_[k]);
        ++swaps_;
        --k;
        continue;
      }
      {
        StageTimer t(profile_.qr_time);
        if (!h_.build(k, cols_[k]))
          throw ConsistencyError("zero pivot after a passed Lovasz test");
      }
      valid_ = k + 1;
      ++k;
    }
    return removed;
  }

  RFactor r_factor() const {
    RFactor out(valid_, ctx_);
    for (std::size_t j = 0; j < valid_; ++j)
      for (std::size_t i = 0; i <= j; ++i) mpfr_set(out(i, j).get(), cols_[j][i].get(), MPFR_RNDN);
    return out;
  }

 private:
  // Size-reduces b_k against b_0..b_{k-1}. Returns false if b_k is zero.
  bool size_reduce_stage(std::size_t k) {
    auto& t = cols_[k];
    if (t.size() != h_.ambient()) t = h_.make_column();
    IntVector& bk = rows_[k];
    const long limit_bits = ctx_.bits() - 4;
    unsigned passes = 0;
    for (;;) {
      {
        StageTimer timer(profile_.qr_time);
        h_.load(bk, t);
        h_.apply(t, k);
      }
      StageTimer timer(profile_.size_reduce_time);
      bool changed = false;
      std::size_t max_q_bits = 0;
      for (std::size_t i = k; i-- > 0;) {
        mpfr_div(x_.get(), t[i].get(), cols_[i][i].get(), MPFR_RNDN);
        if (mpfr_cmpabs_half(x_.get()) <= 0) continue;
        // On refreshed columns a coefficient within rounding noise of +-1/2
        // counts as reduced; otherwise a vector numerically inside the span
        // of its prefix flips between +1/2 and -1/2 forever.
        if (passes > 0 && near_half(x_)) continue;
        mpfr_get_z(q_.get_mpz_t(), x_.get(), MPFR_RNDNA);
        max_q_bits = std::max(max_q_bits, mpz_sizeinbase(q_.get_mpz_t(), 2));
        const IntVector& bi = rows_[i];
        for (std::size_t l = 0; l < bk.size(); ++l)
          mpz_submul(bk[l].get_mpz_t(), q_.get_mpz_t(), bi[l].get_mpz_t());
        const auto& ci = cols_[i];
        for (std::size_t l = 0; l <= i; ++l) {
          mpfr_mul_z(x_.get(), ci[l].get(), q_.get_mpz_t(), MPFR_RNDN);
          mpfr_sub(t[l].get(), t[l].get(), x_.get(), MPFR_RNDN);
        }
        changed = true;
        ++size_reductions_;
      }
      if (!changed) break;
      ++passes;
      if (passes > kCoarsePasses && static_cast<long>(max_q_bits) > limit_bits)
        throw PrecisionError("size reduction of vector " + std::to_string(k + 1) +
                                 " needs coefficients beyond 2^" + std::to_string(limit_bits) +
                                 " after " + std::to_string(kCoarsePasses) +
                                 " refreshes; R is untrustworthy at " +
                                 std::to_string(ctx_.bits()) + " bits",
                             k);
      if (passes > kMaxPasses)
        throw PrecisionError("size reduction of vector " + std::to_string(k + 1) +
                                 " does not converge at " + std::to_string(ctx_.bits()) + " bits",
                             k);
    }
    for (const auto& x : bk)
      if (sgn(x) != 0) return true;
    return false;
  }

  bool near_half(const MPFloat& x) {
    mpfr_abs(lhs_.get(), x.get(), MPFR_RNDN);
    mpfr_sub_d(lhs_.get(), lhs_.get(), 0.5, MPFR_RNDN);
    return mpfr_cmp_ui_2exp(lhs_.get(), 1, -(ctx_.bits() / 2)) <= 0;
  }

  bool lovasz_holds(std::size_t k) {
    StageTimer timer(profile_.size_reduce_time);
    const auto& t = cols_[k];
    lhs_ = h_.tail_norm_sq(t, k);
    mpfr_fma(lhs_.get(), t[k - 1].get(), t[k - 1].get(), lhs_.get(), MPFR_RNDN);
    const MPFloat& prev = cols_[k - 1][k - 1];
    mpfr_mul(rhs_.get(), prev.get(), prev.get(), MPFR_RNDN);
    mpfr_mul(rhs_.get(), rhs_.get(), delta_.get(), MPFR_RNDN);
    return lhs_ >= rhs_;
  }

  std::vector<IntVector>& rows_;
  PrecisionCtx ctx_;
  Householder h_;
  MPFloat delta_;
  StageProfile& profile_;
  // cols_[j]: working column of b_j; entries [0, j] form column j of R.
  std::vector<std::vector<MPFloat>> cols_;
  std::size_t valid_ = 0;
  std::uint64_t swaps_ = 0;
  std::uint64_t size_reductions_ = 0;
  std::uint64_t iterations_ = 0;
  std::uint64_t cap_ = std::numeric_limits<std::uint64_t>::max();
  MPFloat x_;
  MPFloat lhs_;
  MPFloat rhs_;
  BigInt q_;
};

}  // namespace detail

/// True iff r(i,i)^2 + r(i-1,i)^2 >= delta * r(i-1,i-1)^2, i.e. no swap is
/// needed at position i (0-based, 1 <= i < n).
inline bool lovasz_ok(const RFactor& r, std::size_t i, double delta) {
  if (i == 0 || i >= r.size()) throw DimensionError("Lovasz index out of range");
  const PrecisionCtx w = r.ctx().widened(8);
  MPFloat lhs = MPFloat(r(i, i), w) * r(i, i) + MPFloat(r(i - 1, i), w) * r(i - 1, i);
  MPFloat rhs = MPFloat(r(i - 1, i - 1), w) * r(i - 1, i - 1) * MPFloat(delta, w);
  return lhs >= rhs;
}

struct SizeReduceResult {
  Basis basis;
  RFactor r;
  std::uint64_t operations = 0;
};

/// One size-reduction sweep over a full (B, R) pair: j ascending, i
/// descending, b_j -= round(r_ij / r_ii) b_i with the matching floating
/// update of column j. Rounding is half away from zero.
inline SizeReduceResult size_reduce(const Basis& b, const RFactor& r_in, PrecisionCtx ctx) {
  const std::size_t n = b.rank();
  if (r_in.size() != n) throw DimensionError("R factor size does not match basis rank");
  SizeReduceResult out{b, RFactor(n, ctx), 0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) mpfr_set(out.r(i, j).get(), r_in(i, j).get(), MPFR_RNDN);
  auto& rows = out.basis.mutable_rows();
  const long limit_bits = ctx.bits() - 4;
  MPFloat x(ctx);
  BigInt q;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = j; i-- > 0;) {
      mpfr_div(x.get(), out.r(i, j).get(), out.r(i, i).get(), MPFR_RNDN);
      if (detail::mpfr_cmpabs_half(x.get()) <= 0) continue;
      mpfr_get_z(q.get_mpz_t(), x.get(), MPFR_RNDNA);
      if (static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2)) > limit_bits)
        throw PrecisionError("size-reduction coefficient exceeds 2^" + std::to_string(limit_bits) +
                                 "; R is untrustworthy",
                             j);
      for (std::size_t l = 0; l < rows[j].size(); ++l)
        mpz_submul(rows[j][l].get_mpz_t(), q.get_mpz_t(), rows[i][l].get_mpz_t());
      for (std::size_t l = 0; l <= i; ++l) {
        mpfr_mul_z(x.get(), out.r(l, i).get(), q.get_mpz_t(), MPFR_RNDN);
        mpfr_sub(out.r(l, j).get(), out.r(l, j).get(), x.get(), MPFR_RNDN);
      }
      ++out.operations;
    }
  }
  return out;
}

/// LLL reduction. The output spans the same lattice, is size-reduced and
/// satisfies the Lovasz condition at every position with respect to the
/// returned R.
inline LLLOutcome lll_reduce(const Basis& b, const LLLParams& p = {}) {
  check_delta(p.delta);
  const auto start = Clock::now();
  LLLOutcome out;
  std::vector<IntVector> rows = b.rows();
  detail::ReductionEngine eng(rows, p.ctx, p.delta, out.profile);
  eng.set_iteration_cap(p.max_iterations.value_or(default_iteration_cap(b.rank(), b.max_bits())));
  eng.run(0, rows.size(), false);
  out.r = eng.r_factor();
  out.swaps = eng.swaps();
  out.size_reductions = eng.size_reductions();
  out.basis = Basis(std::move(rows));
  out.profile.close(Clock::now() - start);
  return out;
}

}  // namespace latred
