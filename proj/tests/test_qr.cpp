#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latred/latgen.hpp"
#include "latred/qr.hpp"

using namespace latred;

namespace {

Basis random_basis(std::mt19937_64& rng, std::size_t n, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  for (;;) {
    std::vector<IntVector> rows(n, IntVector(n));
    for (auto& r : rows)
      for (auto& x : r) x = d(rng);
    Basis b(std::move(rows));
    if (sgn(detail::bareiss_det(gram(b))) != 0) return b;
  }
}

double ulp_of(const MPFloat& x) {
  if (x.is_zero()) return std::ldexp(1.0, -static_cast<int>(x.precision()) - 100);
  return std::ldexp(1.0, static_cast<int>(mpfr_get_exp(x.get())) - static_cast<int>(x.precision()));
}

}  // namespace

TEST(QrDecompose, Examples) {
  const PrecisionCtx q = PrecisionCtx::quad();
  const RFactor id = qr_decompose(Basis::identity(4), q).r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(id(i, j).to_double(), i == j ? 1.0 : 0.0);

  const RFactor r = qr_decompose(Basis{{2, 0}, {1, 2}}, q).r;
  EXPECT_EQ(r(0, 0).to_double(), 2.0);
  EXPECT_EQ(r(0, 1).to_double(), 1.0);
  EXPECT_EQ(r(1, 1).to_double(), 2.0);
  EXPECT_TRUE(r(1, 0).is_zero());

  EXPECT_EQ(qr_decompose(Basis{{3, 4}}, q).r(0, 0).to_double(), 5.0);
}

TEST(QrDecompose, SingularBasisRejected) {
  EXPECT_THROW(qr_decompose(Basis{{1, 2, 3}, {2, 4, 6}}, PrecisionCtx::quad()), SingularBasisError);
}

TEST(QrDecompose, NumericallyZeroPivotRaisesPrecisionError) {
  // Nearly parallel rows: the second pivot is ~2^-40 of the row norm.
  BigInt big;
  mpz_ui_pow_ui(big.get_mpz_t(), 2, 80);
  Basis b(std::vector<IntVector>{{big, big + 1}, {big + 1, big + 2}});
  try {
    qr_decompose(b, PrecisionCtx(53));
    FAIL() << "expected PrecisionError";
  } catch (const PrecisionError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  // The pivot is ~2^-161 of the row norm, so the threshold needs over 322 bits.
  EXPECT_THROW(qr_decompose(b, PrecisionCtx(256)), PrecisionError);
  EXPECT_NO_THROW(qr_decompose(b, PrecisionCtx(400)));
  // Both rows round to the same value: the pivot vanishes whatever the threshold.
  EXPECT_THROW(qr_decompose(b, PrecisionCtx(53), QrOptions{false, false}), PrecisionError);
  const BigInt s = BigInt(1) << 20;
  const Basis mild(std::vector<IntVector>{{s, s + 1}, {s + 1, s + 2}});
  EXPECT_THROW(qr_decompose(mild, PrecisionCtx(53)), PrecisionError);
  EXPECT_NO_THROW(qr_decompose(mild, PrecisionCtx(113)));
}

TEST(QrDecompose, QHasOrthonormalColumnsAndReproducesB) {
  std::mt19937_64 rng(2);
  const PrecisionCtx ctx(160);
  for (int t = 0; t < 5; ++t) {
    const Basis b = random_basis(rng, 6, 1000);
    const QrResult res = qr_decompose(b, ctx, QrOptions{true, true});
    ASSERT_TRUE(res.q.has_value());
    const QFactor& q = *res.q;
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t c = 0; c < 6; ++c) {
        MPFloat s(ctx);
        for (std::size_t l = 0; l < 6; ++l) s += q(l, a) * q(l, c);
        EXPECT_NEAR(s.to_double(), a == c ? 1.0 : 0.0, 1e-40);
      }
    // b_j = sum_i Q(:, i) r(i, j)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t l = 0; l < 6; ++l) {
        MPFloat s(ctx);
        for (std::size_t i = 0; i <= j; ++i) s += q(l, i) * res.r(i, j);
        EXPECT_NEAR(s.to_double(), b[j][l].get_d(), 1e-35);
      }
  }
}

TEST(QrDecompose, GramBackwardErrorBound) {
  std::mt19937_64 rng(8);
  for (long p : {53L, 113L, 200L}) {
    const PrecisionCtx ctx(p);
    for (std::size_t n : {3u, 8u, 20u}) {
      const Basis b = random_basis(rng, n, 1 << 20);
      const RFactor r = qr_decompose(b, ctx).r;
      for (std::size_t i = 0; i < n; ++i) EXPECT_GT(r(i, i).sign(), 0);
      const double bound = std::ldexp(static_cast<double>(n * n), static_cast<int>(-p + 4));
      EXPECT_LE(orthogonality_residual(b, r, ctx).to_double(), bound) << n << " " << p;
    }
  }
}

TEST(QrDecompose, DiagonalProductMatchesDeterminant) {
  std::mt19937_64 rng(13);
  for (long p : {53L, 113L}) {
    const PrecisionCtx ctx(p);
    for (std::size_t n = 2; n <= 10; ++n) {
      const Basis b = random_basis(rng, n, 100);
      const RFactor r = qr_decompose(b, ctx).r;
      MPFloat prod(1.0, ctx.widened(64));
      for (std::size_t i = 0; i < n; ++i) prod *= r(i, i);
      const BigInt det = abs(detail::bareiss_det(b.rows()));
      const MPFloat rel = abs(prod / MPFloat(det, ctx.widened(64)) - MPFloat(1.0, ctx));
      EXPECT_LE(rel.to_double(), std::ldexp(1.0, static_cast<int>(-p / 2)));
    }
  }
}

TEST(OrthogonalityResidual, Examples) {
  const PrecisionCtx d = PrecisionCtx::double_precision();
  EXPECT_TRUE(orthogonality_residual(Basis::identity(5), qr_decompose(Basis::identity(5), d).r, d).is_zero());

  // Hand-built R for rows (2,0),(1,2) with r01 perturbed by 2^-20:
  // R^T R = [[4, 2 + 2^-19], [.., 5 + 2^-19 + 2^-40]]; max |diff| = 2^-19 + 2^-40, scale 5.
  RFactor r(2, d);
  r(0, 0) = MPFloat(2.0, d);
  r(0, 1) = MPFloat(1.0 + std::ldexp(1.0, -20), d);
  r(1, 1) = MPFloat(2.0, d);
  const double hand = (std::ldexp(1.0, -19) + std::ldexp(1.0, -40)) / 5.0;
  const MPFloat got = orthogonality_residual(Basis{{2, 0}, {1, 2}}, r, d);
  EXPECT_LE(std::fabs(got.to_double() - hand), 10 * std::ldexp(hand, -52));
}

TEST(OrthogonalityResidual, NonIncreasingAcrossPrecisionsOnGoldsteinMayer) {
  std::size_t dims[] = {20, 28, 35, 42, 50};
  std::uint64_t seed = 100;
  for (std::size_t n : dims) {
    const Basis b = generate(GenSpec{n, 0, seed++});
    MPFloat prev(1e300, PrecisionCtx::double_precision());
    for (long p : {53L, 113L, 256L, 664L}) {
      const PrecisionCtx ctx(p);
      const MPFloat res = orthogonality_residual(b, qr_decompose(b, ctx, QrOptions{false, false}).r, ctx);
      EXPECT_LE(res, prev) << "n=" << n << " p=" << p;
      prev = res;
    }
  }
}

TEST(QrUpdateAfterSwap, Examples) {
  const PrecisionCtx q = PrecisionCtx::quad();
  const RFactor id = qr_update_after_swap(qr_decompose(Basis::identity(3), q).r, 1, q);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(id(i, j).to_double(), i == j ? 1.0 : 0.0);

  const RFactor up = qr_update_after_swap(qr_decompose(Basis{{2, 0}, {1, 2}}, q).r, 0, q);
  const RFactor oracle = qr_decompose(Basis{{1, 2}, {2, 0}}, q).r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = i; j < 2; ++j) EXPECT_NEAR(up(i, j).to_double(), oracle(i, j).to_double(), 1e-30);
  EXPECT_THROW(qr_update_after_swap(oracle, 1, q), DimensionError);
}

TEST(QrUpdateAfterSwap, AgreesWithRedecompositionWithinEightUlp) {
  std::mt19937_64 rng(4);
  for (long p : {53L, 113L}) {
    const PrecisionCtx ctx(p);
    for (int t = 0; t < 10; ++t) {
      const Basis b = random_basis(rng, 5, 50);
      const RFactor r = qr_decompose(b, ctx).r;
      for (std::size_t i = 0; i + 1 < 5; ++i) {
        auto rows = b.rows();
        std::swap(rows[i], rows[i + 1]);
        // Re-decomposition far above the working precision stands in for the exact R.
        const RFactor oracle = qr_decompose(Basis(rows), ctx.widened(200)).r;
        const RFactor same = qr_decompose(Basis(rows), ctx).r;
        const RFactor up = qr_update_after_swap(r, i, ctx);
        for (std::size_t a = 0; a < 5; ++a) {
          EXPECT_GT(up(a, a).sign(), 0);
          for (std::size_t c = a; c < 5; ++c) {
            const MPFloat diff = abs(MPFloat(up(a, c), ctx.widened(200)) - oracle(a, c));
            // Householder error is columnwise: ulps are taken at the column norm.
            MPFloat col_sq(0.0, ctx);
            for (std::size_t k = 0; k <= c; ++k) col_sq = col_sq + MPFloat(oracle(k, c), ctx) * MPFloat(oracle(k, c), ctx);
            const double scale = ulp_of(mpf_sqrt(col_sq, ctx));
            EXPECT_LE(diff.to_double(), 8 * scale) << "i=" << i << " (" << a << "," << c << ") p=" << p;
            const MPFloat mutual = abs(MPFloat(up(a, c), ctx.widened(16)) - same(a, c));
            EXPECT_LE(mutual.to_double(), 8 * scale) << "vs same precision, i=" << i << " (" << a << "," << c << ") p=" << p;
          }
        }
      }
    }
  }
}

TEST(QrDecompose, DeterministicAcrossRuns) {
  const Basis b = generate(GenSpec{20, 0, 3});
  const PrecisionCtx ctx(113);
  const RFactor a = qr_decompose(b, ctx, QrOptions{false, false}).r;
  const RFactor c = qr_decompose(b, ctx, QrOptions{false, false}).r;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i; j < 20; ++j) EXPECT_EQ(mpfr_cmp(a(i, j).get(), c(i, j).get()), 0);
}
