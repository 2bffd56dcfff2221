#include <gtest/gtest.h>

#include <random>

#include "latred/latgen.hpp"

using namespace latred;

// Vectors reproduced by an independent mt19937_64 + nextprime implementation.
TEST(Generate, TestVectors) {
  EXPECT_EQ(generate(GenSpec{4, 40, 12345}),
            (Basis(std::vector<IntVector>{{BigInt("669513813193"), 0, 0, 0},
                                          {BigInt("309791244409"), 1, 0, 0},
                                          {BigInt("628403062050"), 0, 1, 0},
                                          {BigInt("484641016228"), 0, 0, 1}})));
  EXPECT_EQ(generate(GenSpec{3, 128, 1}),
            (Basis(std::vector<IntVector>{{BigInt("216558092659829361784504486040741375921"), 0, 0},
                                          {BigInt("7154174208330327555567897973392557466"), 1, 0},
                                          {BigInt("25325528793602303156553450910870393268"), 0, 1}})));
  // bit_size 0 selects 10 * dimension.
  EXPECT_EQ(generate(GenSpec{5, 0, 7}),
            (Basis(std::vector<IntVector>{{BigInt("955690007321059"), 0, 0, 0, 0},
                                          {BigInt("395087501902178"), 1, 0, 0, 0},
                                          {BigInt("805671983998926"), 0, 1, 0, 0},
                                          {BigInt("118768093068534"), 0, 0, 1, 0},
                                          {BigInt("667986879307485"), 0, 0, 0, 1}})));
}

TEST(Generate, EngineMatchesStandardSequence) {
  std::mt19937_64 rng(5489);
  rng.discard(9999);
  EXPECT_EQ(rng(), 9981545732273789042ull);
}

TEST(Generate, ForcedSmallModulusShape) {
  const Basis b = generate_with_modulus(3, BigInt(97), 11);
  EXPECT_EQ(b[0], (IntVector{97, 0, 0}));
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_GE(b[i][0], 0);
    EXPECT_LT(b[i][0], 97);
    for (std::size_t j = 1; j < 3; ++j) EXPECT_EQ(b[i][j], i == j ? 1 : 0);
  }
}

TEST(Generate, DeterminantIsPrimeModulusOfExactBitLength) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const GenSpec spec{2 + rng() % 30, 8 + rng() % 400, rng()};
    const Basis b = generate(spec);
    const BigInt p = b[0][0];
    EXPECT_EQ(det_lattice(b).value, p);
    EXPECT_EQ(mpz_sizeinbase(p.get_mpz_t(), 2), spec.bit_size);
    EXPECT_NE(mpz_probab_prime_p(p.get_mpz_t(), 50), 0);
    EXPECT_EQ(b.rank(), spec.dimension);
  }
}

TEST(Generate, SameSeedSameBasisDifferentSeedDiffers) {
  EXPECT_EQ(generate(GenSpec{20, 0, 5}), generate(GenSpec{20, 0, 5}));
  EXPECT_NE(generate(GenSpec{20, 0, 5}), generate(GenSpec{20, 0, 6}));
  EXPECT_NE(generate(GenSpec{20, 0, 5}), generate(GenSpec{20, 190, 5}));
}

TEST(Generate, Errors) {
  EXPECT_THROW(generate(GenSpec{1, 0, 0}), DomainError);
  EXPECT_THROW(generate(GenSpec{4, 1, 0}), DomainError);
}

TEST(Primality, AgreesWithGmpOnRange) {
  for (unsigned long x = 0; x < 20000; ++x)
    EXPECT_EQ(is_probable_prime(BigInt(x)), mpz_probab_prime_p(BigInt(x).get_mpz_t(), 30) != 0) << x;
  // Carmichael numbers and a strong pseudoprime to small bases.
  for (const char* c : {"561", "41041", "3215031751", "3825123056546413051"})
    EXPECT_FALSE(is_probable_prime(BigInt(c))) << c;
  EXPECT_TRUE(is_probable_prime(BigInt("170141183460469231731687303715884105727")));  // 2^127 - 1
}

TEST(Primality, NextPrimeWithBits) {
  EXPECT_EQ(next_prime_with_bits(BigInt(90), 7), 97);
  EXPECT_EQ(next_prime_with_bits(BigInt(0), 7), 67);
  // 127 is the largest 7-bit prime; search past it wraps into range.
  EXPECT_EQ(next_prime_with_bits(BigInt(128), 7), 67);
}
