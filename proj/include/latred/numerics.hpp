#pragma once

// Exact integers (GMP) and MPFR-backed floats with an explicit precision
// context. Every floating value carries its own mantissa width; operations
// taking a PrecisionCtx round their result to that width.

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "latred/errors.hpp"

namespace latred {

using BigInt = mpz_class;

/// Binary mantissa width of floating-point work. Round-to-nearest-even is
/// the only rounding mode.
class PrecisionCtx {
 public:
  static constexpr long kMinBits = 24;
  // About 1.7e6 decimal digits.
  static constexpr long kMaxBits = 5'650'000;

  constexpr explicit PrecisionCtx(long mantissa_bits = 53) : bits_(mantissa_bits) {
    if (bits_ < kMinBits || bits_ > kMaxBits)
      throw DomainError("mantissa width must lie in [24, 5650000] bits, got " +
                        std::to_string(bits_));
  }

  static constexpr PrecisionCtx single() { return PrecisionCtx(24); }
  static constexpr PrecisionCtx double_precision() { return PrecisionCtx(53); }
  static constexpr PrecisionCtx quad() { return PrecisionCtx(113); }

  /// Smallest binary width holding `digits` decimal digits: ceil(d*log2(10)).
  static PrecisionCtx from_decimal_digits(long digits) {
    if (digits <= 0) throw DomainError("decimal digit count must be positive");
    // Integer form of ceil(d * log2 10) via the bound 10^d < 2^b.
    BigInt pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    long bits = static_cast<long>(mpz_sizeinbase(pow10.get_mpz_t(), 2));
    // 10^d is never a power of two, so sizeinbase already equals ceil(log2).
    return PrecisionCtx(std::max(bits, kMinBits));
  }

  constexpr long bits() const noexcept { return bits_; }
  constexpr mpfr_prec_t mpfr_bits() const noexcept { return static_cast<mpfr_prec_t>(bits_); }

  /// Context with `extra` guard bits appended.
  PrecisionCtx widened(long extra) const { return PrecisionCtx(std::min(bits_ + extra, kMaxBits)); }

  friend constexpr bool operator==(PrecisionCtx a, PrecisionCtx b) { return a.bits_ == b.bits_; }

 private:
  long bits_;
};

/// RAII wrapper over mpfr_t. Binary operators round to the wider of the two
/// operand precisions.
class MPFloat {
 public:
  explicit MPFloat(PrecisionCtx ctx = PrecisionCtx::double_precision()) {
    mpfr_init2(v_, ctx.mpfr_bits());
    mpfr_set_zero(v_, 1);
  }
  MPFloat(double x, PrecisionCtx ctx) {
    mpfr_init2(v_, ctx.mpfr_bits());
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  MPFloat(const BigInt& x, PrecisionCtx ctx) {
    mpfr_init2(v_, ctx.mpfr_bits());
    mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN);
  }
  /// Rounds `other` into a context of possibly different width.
  MPFloat(const MPFloat& other, PrecisionCtx ctx) {
    mpfr_init2(v_, ctx.mpfr_bits());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  MPFloat(const MPFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  MPFloat(MPFloat&& other) noexcept {
    // Steal the limbs; leave `other` as a valid minimal-precision zero.
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  MPFloat& operator=(const MPFloat& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  MPFloat& operator=(MPFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~MPFloat() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  long precision() const noexcept { return static_cast<long>(mpfr_get_prec(v_)); }
  PrecisionCtx ctx() const { return PrecisionCtx(std::max<long>(precision(), PrecisionCtx::kMinBits)); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  /// Nearest integer, ties away from zero.
  BigInt round_to_bigint() const {
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDNA);
    return z;
  }

  /// Decimal scientific rendering with `digits` significant digits.
  std::string to_string(int digits = 17) const {
    char* s = nullptr;
    std::string fmt = "%." + std::to_string(std::max(digits - 1, 0)) + "Re";
    mpfr_asprintf(&s, fmt.c_str(), v_);
    std::string out = s ? s : "";
    mpfr_free_str(s);
    return out;
  }

  MPFloat operator-() const {
    MPFloat r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

#define LATRED_MPF_BINOP(op, fn)                                                \
  friend MPFloat operator op(const MPFloat& a, const MPFloat& b) {              \
    MPFloat r(PrecisionCtx(std::max(a.precision(), b.precision())));            \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                            \
    return r;                                                                   \
  }                                                                             \
  MPFloat& operator op##=(const MPFloat& b) {                                   \
    if (b.precision() > precision()) {                                          \
      MPFloat r(PrecisionCtx(b.precision()));                                   \
      fn(r.v_, v_, b.v_, MPFR_RNDN);                                            \
      *this = std::move(r);                                                     \
    } else {                                                                    \
      fn(v_, v_, b.v_, MPFR_RNDN);                                              \
    }                                                                           \
    return *this;                                                               \
  }
  LATRED_MPF_BINOP(+, mpfr_add)
  LATRED_MPF_BINOP(-, mpfr_sub)
  LATRED_MPF_BINOP(*, mpfr_mul)
  LATRED_MPF_BINOP(/, mpfr_div)
#undef LATRED_MPF_BINOP

  friend bool operator<(const MPFloat& a, const MPFloat& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator>(const MPFloat& a, const MPFloat& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator<=(const MPFloat& a, const MPFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator>=(const MPFloat& a, const MPFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
  friend bool operator==(const MPFloat& a, const MPFloat& b) { return mpfr_equal_p(a.v_, b.v_); }

 private:
  mpfr_t v_;
};

inline MPFloat abs(const MPFloat& x) {
  MPFloat r(x);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}

/// `x` rounded to the context; exact whenever bit-length(x) <= mantissa bits.
inline MPFloat mpf_from_bigint(const BigInt& x, PrecisionCtx ctx) { return MPFloat(x, ctx); }

/// Correctly rounded square root.
inline MPFloat mpf_sqrt(const MPFloat& x, PrecisionCtx ctx) {
  if (x.sign() < 0) throw DomainError("square root of a negative number");
  MPFloat r(ctx);
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

inline MPFloat mpf_log(const MPFloat& x, PrecisionCtx ctx) {
  if (x.sign() <= 0) throw DomainError("logarithm of a non-positive number");
  MPFloat r(ctx);
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

inline MPFloat mpf_exp(const MPFloat& x, PrecisionCtx ctx) {
  MPFloat r(ctx);
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

inline MPFloat mpf_pi(PrecisionCtx ctx) {
  MPFloat r(ctx);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

/// ln Gamma(x) for x > 0. Evaluated with 32 guard bits, then rounded.
inline MPFloat gamma_ln(const MPFloat& x, PrecisionCtx ctx) {
  if (x.sign() <= 0) throw DomainError("ln Gamma requires a positive argument");
  MPFloat wide(ctx.widened(32));
  mpfr_lngamma(wide.get(), x.get(), MPFR_RNDN);
  return MPFloat(wide, ctx);
}

/// ln |x| for an exact integer, evaluated without converting x to a float
/// first (so million-bit integers keep their leading bits).
inline MPFloat ln_bigint(const BigInt& x, PrecisionCtx ctx) {
  if (sgn(x) == 0) throw DomainError("logarithm of zero");
  MPFloat wide(mpf_from_bigint(abs(x), ctx.widened(32)));
  return mpf_log(wide, ctx);
}

}  // namespace latred
