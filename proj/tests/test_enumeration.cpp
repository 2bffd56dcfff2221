#include <gtest/gtest.h>

#include <random>

#include "latred/enumeration.hpp"
#include "latred/latgen.hpp"
#include "latred/lll.hpp"
#include "oracles.hpp"

using namespace latred;

namespace {

EnumRequest request_for(const Basis& b, double radius_sq, PrecisionCtx ctx = PrecisionCtx::double_precision()) {
  EnumRequest req;
  req.r_block = qr_decompose(b, PrecisionCtx::quad()).r;
  req.radius_sq = MPFloat(radius_sq, PrecisionCtx::quad());
  req.ctx = ctx;
  return req;
}

RFactor diag(std::initializer_list<double> d) {
  RFactor r(d.size(), PrecisionCtx::quad());
  std::size_t i = 0;
  for (double x : d) {
    r(i, i) = MPFloat(x, PrecisionCtx::quad());
    ++i;
  }
  return r;
}

}  // namespace

TEST(EnumerateShortest, Examples) {
  EnumRequest id;
  id.r_block = diag({1, 1, 1});
  id.radius_sq = MPFloat(1.5, PrecisionCtx::quad());
  auto a = enumerate_shortest(id);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->norm_sq.to_double(), 1.0);
  int nonzero = 0;
  for (const auto& x : a->coeffs) nonzero += sgn(x) != 0;
  EXPECT_EQ(nonzero, 1);

  auto b = enumerate_shortest(request_for(Basis{{2, 0}, {1, 2}}, 4.25));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->norm_sq.to_double(), 4.0);
  EXPECT_EQ(b->coeffs, (IntVector{1, 0}));

  EnumRequest d;
  d.r_block = diag({2, 3, 5});
  d.radius_sq = MPFloat(100.0, PrecisionCtx::quad());
  auto c = enumerate_shortest(d);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->norm_sq.to_double(), 4.0);
  EXPECT_EQ(c->coeffs, (IntVector{1, 0, 0}));
}

TEST(EnumerateShortest, Errors) {
  EnumRequest r;
  r.r_block = diag({1, 1});
  r.radius_sq = MPFloat(0.0, PrecisionCtx::quad());
  EXPECT_THROW(enumerate_shortest(r), DomainError);
  r.radius_sq = MPFloat(-1.0, PrecisionCtx::quad());
  EXPECT_THROW(enumerate_shortest(r), DomainError);
}

TEST(EnumerateShortest, RadiusIsStrict) {
  // Minimum is exactly 4; a radius of 4 finds nothing.
  EXPECT_FALSE(enumerate_shortest(request_for(Basis{{2, 0}, {1, 2}}, 4.0)));
}

TEST(BruteForceShortest, Examples) {
  EXPECT_EQ(*brute_force_shortest(Basis::identity(2), 2).exact_norm_sq, 1);
  EXPECT_EQ(*brute_force_shortest(Basis{{2, 0}, {1, 2}}, 3).exact_norm_sq, 4);
  EXPECT_EQ(*brute_force_shortest(Basis{{4, 1}, {3, 1}}, 5).exact_norm_sq, 1);
  EXPECT_THROW(brute_force_shortest(Basis::identity(10), 10), DomainError);
  EXPECT_THROW(brute_force_shortest(Basis::identity(2), 0), DomainError);
}

TEST(BruteForceShortest, LargeEntriesUseExactPath) {
  BigInt big;
  mpz_ui_pow_ui(big.get_mpz_t(), 10, 30);
  const Basis b(std::vector<IntVector>{{big, 0}, {big - 1, 1}});
  // (b0 - b1) = (1, -1).
  EXPECT_EQ(*brute_force_shortest(b, 2).exact_norm_sq, 2);
}

TEST(EnumerateShortest, OracleEquivalenceOnSmallReducedBases) {
  std::mt19937_64 rng(31337);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 5;
    const Basis b = lll_reduce(oracle::random_basis(rng, n, n, -50, 50)).basis;
    const RFactor r = qr_decompose(b, PrecisionCtx::quad()).r;
    EnumRequest req;
    req.r_block = r;
    req.radius_sq = r(0, 0) * r(0, 0) * MPFloat(1.0 + 1e-9, PrecisionCtx::quad());
    auto got = enumerate_shortest(req);
    ASSERT_TRUE(got);
    const BigInt exact = verify_exact(*got, b);
    const EnumResult bf = brute_force_shortest(b, oracle::certified_coeff_bound(b, norm_sq(b[0])));
    EXPECT_EQ(exact, *bf.exact_norm_sq);
    EXPECT_EQ(got->coeffs, bf.coeffs) << "tie-break differs";
    // Exactness guard.
    const MPFloat rel = abs(got->norm_sq / MPFloat(exact, PrecisionCtx::quad()) - MPFloat(1.0, PrecisionCtx::quad()));
    EXPECT_LE(rel.to_double(), std::ldexp(1.0, -26));
  }
}

TEST(EnumerateShortest, ZigZagAndAscendingAgree) {
  std::mt19937_64 rng(8);
  std::uint64_t zz_total = 0, asc_total = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 4 + rng() % 8;
    const Basis b = lll_reduce(oracle::random_basis(rng, n, n, -1000, 1000)).basis;
    const RFactor r = qr_decompose(b, PrecisionCtx::quad()).r;
    EnumRequest req;
    req.r_block = r;
    req.radius_sq = r(0, 0) * r(0, 0) * MPFloat(1.01, PrecisionCtx::quad());
    auto zz = enumerate_shortest(req);
    req.order = EnumOrder::Ascending;
    auto asc = enumerate_shortest(req);
    ASSERT_TRUE(zz && asc);
    EXPECT_EQ(verify_exact(*zz, b), verify_exact(*asc, b));
    EXPECT_EQ(zz->coeffs, asc->coeffs);
    zz_total += zz->nodes_visited;
    asc_total += asc->nodes_visited;
  }
  EXPECT_LE(zz_total, asc_total);
}

TEST(EnumerateShortest, ShrinkingRadiusBelowMinimumFindsNothing) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const Basis b = lll_reduce(oracle::random_basis(rng, 6, 6, -200, 200)).basis;
    EnumRequest req;
    req.r_block = qr_decompose(b, PrecisionCtx::quad()).r;
    req.radius_sq = req.r_block(0, 0) * req.r_block(0, 0) * MPFloat(1.5, PrecisionCtx::quad());
    auto got = enumerate_shortest(req);
    ASSERT_TRUE(got);
    req.radius_sq = got->norm_sq * MPFloat(1.0 - 1e-9, PrecisionCtx::quad());
    EXPECT_FALSE(enumerate_shortest(req));
  }
}

TEST(EnumerateShortest, MultiprecisionPathMatchesDouble) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const Basis b = lll_reduce(oracle::random_basis(rng, 7, 7, -500, 500)).basis;
    EnumRequest req;
    req.r_block = qr_decompose(b, PrecisionCtx(200)).r;
    req.radius_sq = req.r_block(0, 0) * req.r_block(0, 0) * MPFloat(1.01, PrecisionCtx(200));
    auto d = enumerate_shortest(req);
    req.ctx = PrecisionCtx(200);
    auto m = enumerate_shortest(req);
    ASSERT_TRUE(d && m);
    EXPECT_EQ(verify_exact(*d, b), verify_exact(*m, b));
    EXPECT_EQ(d->coeffs, m->coeffs);
  }
}

TEST(EnumerateShortest, BudgetExceededCarriesBestSoFar) {
  const Basis b = lll_reduce(generate(GenSpec{20, 0, 8})).basis;
  EnumRequest req;
  req.r_block = qr_decompose(b, PrecisionCtx::quad()).r;
  req.radius_sq = req.r_block(0, 0) * req.r_block(0, 0) * MPFloat(1.01, PrecisionCtx::quad());
  const auto full = enumerate_shortest(req);
  ASSERT_TRUE(full);
  const std::uint64_t total = full->nodes_visited;
  ASSERT_GT(total, 100u);

  req.node_budget = total;
  EXPECT_EQ(enumerate_shortest(req)->coeffs, full->coeffs);

  // A leaf sits 20 levels down, so 5 nodes cannot reach one.
  req.node_budget = 5;
  try {
    enumerate_shortest(req);
    FAIL() << "expected EnumBudgetExceeded";
  } catch (const EnumBudgetExceeded& e) {
    EXPECT_FALSE(e.best());
  }

  req.node_budget = total - 1;
  try {
    enumerate_shortest(req);
    FAIL() << "expected EnumBudgetExceeded";
  } catch (const EnumBudgetExceeded& e) {
    ASSERT_TRUE(e.best());
    EXPECT_FALSE(e.best()->coeffs.empty());
    EXPECT_GE(e.best()->norm_sq, full->norm_sq);
  }
}

TEST(EnumerateBlock, CountsNodesWhenNothingFound) {
  const RFactor r = qr_decompose(Basis::identity(3), PrecisionCtx::quad()).r;
  std::uint64_t nodes = 0;
  auto res = enumerate_block(r.block_as_double(0, 3), 1.0, std::nullopt, nodes);
  EXPECT_FALSE(res);
  EXPECT_GT(nodes, 0u);
}

TEST(Combine, MatchesManualSum) {
  const Basis b{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
  EXPECT_EQ(combine(b, 1, IntVector{2, -1}), (IntVector{1, 2, 2}));
}
