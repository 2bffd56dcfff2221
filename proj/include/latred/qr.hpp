#pragma once

// Householder QR of a row basis at configurable precision. B^T = Q R with R
// upper triangular and positive diagonal; column j of R holds the
// coordinates of b_j in the orthonormal frame.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latred/basis.hpp"
#include "latred/errors.hpp"
#include "latred/numerics.hpp"

namespace latred {

/// Dense square matrix of MPFloat, row-major.
class FloatMatrix {
 public:
  FloatMatrix() = default;
  FloatMatrix(std::size_t rows, std::size_t cols, PrecisionCtx ctx)
      : rows_(rows), cols_(cols), ctx_(ctx), data_(rows * cols, MPFloat(ctx)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  PrecisionCtx ctx() const noexcept { return ctx_; }

  MPFloat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const MPFloat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  PrecisionCtx ctx_{};
  std::vector<MPFloat> data_;
};

/// Upper-triangular R factor; r(i, j) for i <= j, zero below the diagonal,
/// r(i, i) > 0.
class RFactor {
 public:
  RFactor() = default;
  RFactor(std::size_t n, PrecisionCtx ctx) : m_(n, n, ctx) {}

  std::size_t size() const noexcept { return m_.rows(); }
  PrecisionCtx ctx() const noexcept { return m_.ctx(); }
  MPFloat& operator()(std::size_t i, std::size_t j) { return m_(i, j); }
  const MPFloat& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// Diagonal block [k, k + len) as doubles.
  std::vector<std::vector<double>> block_as_double(std::size_t k, std::size_t len) const {
    std::vector<std::vector<double>> out(len, std::vector<double>(len, 0.0));
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = i; j < len; ++j) out[i][j] = m_(k + i, k + j).to_double();
    return out;
  }

 private:
  FloatMatrix m_;
};

/// m x n matrix with orthonormal columns.
using QFactor = FloatMatrix;

namespace detail {

// Stored Householder reflectors for a growing prefix of basis vectors.
// Reflector k acts on coordinates [k, m); after it, coordinate k is
// multiplied by flip_[k] so that the produced diagonal entry is positive.
class Householder {
 public:
  Householder(std::size_t m, PrecisionCtx ctx)
      : m_(m), ctx_(ctx), v_(m), beta_(m, MPFloat(ctx.widened(0))), flip_(m, 1),
        identity_(m, true), s_(ctx), tmp_(ctx) {}

  std::size_t ambient() const noexcept { return m_; }
  PrecisionCtx ctx() const noexcept { return ctx_; }

  std::vector<MPFloat> make_column() const { return std::vector<MPFloat>(m_, MPFloat(ctx_)); }

  void load(const IntVector& b, std::vector<MPFloat>& t) const {
    for (std::size_t l = 0; l < m_; ++l) mpfr_set_z(t[l].get(), b[l].get_mpz_t(), MPFR_RNDN);
  }

  // Applies reflectors 0..count-1, in order, to t.
  void apply(std::vector<MPFloat>& t, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) apply_one(k, t);
  }

  // Squared norm of t[k, m).
  MPFloat tail_norm_sq(const std::vector<MPFloat>& t, std::size_t k) {
    MPFloat acc(ctx_);
    for (std::size_t l = k; l < m_; ++l) mpfr_fma(acc.get(), t[l].get(), t[l].get(), acc.get(), MPFR_RNDN);
    return acc;
  }

  // Builds reflector k from t[k, m). On return t[k] = ||t[k, m)|| and the
  // rest of the tail is zero. Returns false if the tail is exactly zero.
  bool build(std::size_t k, std::vector<MPFloat>& t) {
    bool tail_zero = true;
    for (std::size_t l = k + 1; l < m_; ++l)
      if (!t[l].is_zero()) {
        tail_zero = false;
        break;
      }
    if (tail_zero) {
      if (t[k].is_zero()) return false;
      identity_[k] = true;
      flip_[k] = t[k].sign() < 0 ? -1 : 1;
      mpfr_abs(t[k].get(), t[k].get(), MPFR_RNDN);
      return true;
    }
    identity_[k] = false;
    MPFloat norm = tail_norm_sq(t, k);
    mpfr_sqrt(norm.get(), norm.get(), MPFR_RNDN);
    // v = x + sign(x0) ||x|| e0; H x = -sign(x0) ||x|| e0.
    const int s0 = t[k].sign() < 0 ? -1 : 1;
    auto& v = v_[k];
    v.assign(m_ - k, MPFloat(ctx_));
    for (std::size_t l = k; l < m_; ++l) mpfr_set(v[l - k].get(), t[l].get(), MPFR_RNDN);
    MPFloat ax0 = abs(t[k]);
    if (s0 > 0)
      mpfr_add(v[0].get(), v[0].get(), norm.get(), MPFR_RNDN);
    else
      mpfr_sub(v[0].get(), v[0].get(), norm.get(), MPFR_RNDN);
    // beta = 2 / ||v||^2 = 1 / (||x|| (||x|| + |x0|))
    mpfr_add(tmp_.get(), norm.get(), ax0.get(), MPFR_RNDN);
    mpfr_mul(tmp_.get(), tmp_.get(), norm.get(), MPFR_RNDN);
    mpfr_ui_div(beta_[k].get(), 1, tmp_.get(), MPFR_RNDN);
    flip_[k] = s0 > 0 ? -1 : 1;
    mpfr_set(t[k].get(), norm.get(), MPFR_RNDN);
    for (std::size_t l = k + 1; l < m_; ++l) mpfr_set_zero(t[l].get(), 1);
    return true;
  }

  void apply_one(std::size_t k, std::vector<MPFloat>& t) {
    if (!identity_[k]) {
      const auto& v = v_[k];
      mpfr_set_zero(s_.get(), 1);
      for (std::size_t l = k; l < m_; ++l) mpfr_fma(s_.get(), v[l - k].get(), t[l].get(), s_.get(), MPFR_RNDN);
      mpfr_mul(s_.get(), s_.get(), beta_[k].get(), MPFR_RNDN);
      for (std::size_t l = k; l < m_; ++l) {
        mpfr_mul(tmp_.get(), s_.get(), v[l - k].get(), MPFR_RNDN);
        mpfr_sub(t[l].get(), t[l].get(), tmp_.get(), MPFR_RNDN);
      }
    }
    if (flip_[k] < 0) mpfr_neg(t[k].get(), t[k].get(), MPFR_RNDN);
  }

  // Transpose application (reverse order of the same orthogonal maps).
  void apply_transpose_one(std::size_t k, std::vector<MPFloat>& t) {
    if (flip_[k] < 0) mpfr_neg(t[k].get(), t[k].get(), MPFR_RNDN);
    if (!identity_[k]) {
      const auto& v = v_[k];
      mpfr_set_zero(s_.get(), 1);
      for (std::size_t l = k; l < m_; ++l) mpfr_fma(s_.get(), v[l - k].get(), t[l].get(), s_.get(), MPFR_RNDN);
      mpfr_mul(s_.get(), s_.get(), beta_[k].get(), MPFR_RNDN);
      for (std::size_t l = k; l < m_; ++l) {
        mpfr_mul(tmp_.get(), s_.get(), v[l - k].get(), MPFR_RNDN);
        mpfr_sub(t[l].get(), t[l].get(), tmp_.get(), MPFR_RNDN);
      }
    }
  }

 private:
  std::size_t m_;
  PrecisionCtx ctx_;
  std::vector<std::vector<MPFloat>> v_;
  std::vector<MPFloat> beta_;
  std::vector<int> flip_;
  std::vector<bool> identity_;
  MPFloat s_;
  MPFloat tmp_;
};

inline MPFloat int_norm(const IntVector& b, PrecisionCtx ctx) {
  return mpf_sqrt(mpf_from_bigint(norm_sq(b), ctx.widened(8)), ctx);
}

}  // namespace detail

struct QrOptions {
  bool want_q = false;
  /// Reject pivots r(i, i) < 2^(-bits/2) * ||b_i||.
  bool check_pivots = true;
};

struct QrResult {
  RFactor r;
  std::optional<QFactor> q;
};

/// Extra mantissa bits carried by qr_decompose's reflectors; R is rounded to
/// the requested precision on output.
inline constexpr long kQrGuardBits = 10;

/// Plain (unblocked) Householder QR of the rows of `b`.
inline QrResult qr_decompose(const Basis& b, PrecisionCtx ctx, QrOptions opts = {}) {
  const std::size_t n = b.rank();
  const std::size_t m = b.ambient_dim();
  detail::Householder h(m, ctx.widened(kQrGuardBits));
  QrResult out{RFactor(n, ctx), std::nullopt};
  auto t = h.make_column();
  MPFloat threshold(ctx);
  for (std::size_t k = 0; k < n; ++k) {
    h.load(b[k], t);
    h.apply(t, k);
    for (std::size_t i = 0; i < k; ++i) mpfr_set(out.r(i, k).get(), t[i].get(), MPFR_RNDN);
    if (!h.build(k, t)) {
      const Basis prefix(IntMatrix(b.rows().begin(), b.rows().begin() + static_cast<std::ptrdiff_t>(k + 1)));
      if (sgn(detail::bareiss_det(gram(prefix))) == 0)
        throw SingularBasisError("basis vector " + std::to_string(k + 1) +
                                 " lies in the span of the preceding vectors");
      throw PrecisionError("pivot of column " + std::to_string(k + 1) + " vanishes at " +
                               std::to_string(ctx.bits()) + " bits; increase precision",
                           k);
    }
    mpfr_set(out.r(k, k).get(), t[k].get(), MPFR_RNDN);
    if (opts.check_pivots) {
      threshold = detail::int_norm(b[k], ctx);
      mpfr_div_2si(threshold.get(), threshold.get(), ctx.bits() / 2, MPFR_RNDN);
      if (out.r(k, k) < threshold)
        throw PrecisionError("pivot of column " + std::to_string(k + 1) +
                                 " is numerically zero at " + std::to_string(ctx.bits()) +
                                 " bits; increase precision",
                             k);
    }
  }
  if (opts.want_q) {
    QFactor q(m, n, ctx);
    for (std::size_t j = 0; j < n; ++j) {
      auto e = h.make_column();
      mpfr_set_ui(e[j].get(), 1, MPFR_RNDN);
      for (std::size_t k = n; k-- > 0;) h.apply_transpose_one(k, e);
      for (std::size_t l = 0; l < m; ++l) mpfr_set(q(l, j).get(), e[l].get(), MPFR_RNDN);
    }
    out.q = std::move(q);
  }
  return out;
}

/// max |Gram(B) - R^T R| / max |Gram(B)|, a backward-error proxy that needs
/// no Q. Evaluated at twice the input precision plus guard bits.
inline MPFloat orthogonality_residual(const Basis& b, const RFactor& r, PrecisionCtx ctx) {
  const std::size_t n = b.rank();
  if (r.size() != n) throw DimensionError("R factor size does not match basis rank");
  const PrecisionCtx w(std::min(2 * std::max(r.ctx().bits(), ctx.bits()) + 64, PrecisionCtx::kMaxBits));
  const IntMatrix g = gram(b);
  MPFloat worst(w), scale(w), acc(w), ge(w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      mpfr_set_zero(acc.get(), 1);
      for (std::size_t k = 0; k <= i; ++k)
        mpfr_fma(acc.get(), r(k, i).get(), r(k, j).get(), acc.get(), MPFR_RNDN);
      mpfr_set_z(ge.get(), g[i][j].get_mpz_t(), MPFR_RNDN);
      mpfr_sub(acc.get(), ge.get(), acc.get(), MPFR_RNDN);
      mpfr_abs(acc.get(), acc.get(), MPFR_RNDN);
      mpfr_abs(ge.get(), ge.get(), MPFR_RNDN);
      if (acc > worst) worst = acc;
      if (ge > scale) scale = ge;
    }
  if (scale.is_zero()) return MPFloat(ctx);
  return MPFloat(worst / scale, ctx);
}

/// R of the basis with rows i and i+1 (0-based) exchanged, by one Givens
/// rotation on rows i, i+1 of R.
inline RFactor qr_update_after_swap(const RFactor& r_in, std::size_t i, PrecisionCtx ctx) {
  const std::size_t n = r_in.size();
  if (i + 1 >= n) throw DimensionError("swap index out of range");
  RFactor r(n, ctx);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = a; c < n; ++c) mpfr_set(r(a, c).get(), r_in(a, c).get(), MPFR_RNDN);
  // Exchange columns i and i+1; subdiagonal (i+1, i) becomes nonzero.
  for (std::size_t a = 0; a < i; ++a) std::swap(r(a, i), r(a, i + 1));
  MPFloat a0(r(i, i + 1), ctx);   // new column i, row i
  MPFloat b0(r(i + 1, i + 1), ctx);  // new column i, row i+1
  MPFloat old_ii(r(i, i), ctx);
  MPFloat rho(ctx);
  mpfr_hypot(rho.get(), a0.get(), b0.get(), MPFR_RNDN);
  MPFloat c = a0 / rho, s = b0 / rho;
  // Column i: (a0, b0) -> (rho, 0).
  r(i, i) = rho;
  // Column i+1 (previously column i): (old_ii, 0) -> (c*old_ii, -s*old_ii).
  r(i, i + 1) = MPFloat(c * old_ii, ctx);
  r(i + 1, i + 1) = MPFloat(-(s * old_ii), ctx);
  for (std::size_t col = i + 2; col < n; ++col) {
    MPFloat x = r(i, col), y = r(i + 1, col);
    r(i, col) = MPFloat(c * x + s * y, ctx);
    r(i + 1, col) = MPFloat(c * y - s * x, ctx);
  }
  r(i + 1, i) = MPFloat(ctx);
  if (r(i + 1, i + 1).sign() < 0)
    for (std::size_t col = i + 1; col < n; ++col) r(i + 1, col) = -r(i + 1, col);
  return r;
}

}  // namespace latred
