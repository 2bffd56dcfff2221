#pragma once

// Goldstein-Mayer style random lattices in the SVP-challenge shape:
//   row 0 = (p, 0, ..., 0), row i = (x_i, e_i) with x_i uniform in [0, p).
//
// Randomness: std::mt19937_64 seeded with the 64-bit seed. A k-bit draw
// takes ceil(k/64) consecutive outputs w_0, w_1, ... and forms
// sum w_j 2^(64 j), truncated to k bits. The modulus is the smallest prime
// >= (draw | 2^(k-1) | 1); each x_i is a k-bit draw, rejected until < p.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "latred/basis.hpp"
#include "latred/errors.hpp"
#include "latred/numerics.hpp"

namespace latred {

struct GenSpec {
  std::size_t dimension = 0;
  /// Bits of the prime modulus; 0 selects the default 10 * dimension.
  std::size_t bit_size = 0;
  std::uint64_t seed = 0;

  std::size_t effective_bits() const { return bit_size ? bit_size : 10 * dimension; }
};

namespace detail {

inline BigInt random_bits(std::mt19937_64& rng, std::size_t bits) {
  BigInt acc = 0;
  const std::size_t words = (bits + 63) / 64;
  for (std::size_t j = 0; j < words; ++j) {
    const std::uint64_t w = rng();
    BigInt part;
    mpz_import(part.get_mpz_t(), 1, -1, sizeof w, 0, 0, &w);
    mpz_mul_2exp(part.get_mpz_t(), part.get_mpz_t(), 64 * j);
    acc += part;
  }
  mpz_fdiv_r_2exp(acc.get_mpz_t(), acc.get_mpz_t(), bits);
  return acc;
}

inline constexpr unsigned kSmallPrimes[64] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

}  // namespace detail

/// Miller-Rabin with fixed bases: the first 12 primes (deterministic below
/// 2^64) for numbers up to 64 bits, the first 64 primes otherwise.
inline bool is_probable_prime(const BigInt& n) {
  if (n < 2) return false;
  for (unsigned p : detail::kSmallPrimes) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  BigInt d = n - 1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  const std::size_t rounds = mpz_sizeinbase(n.get_mpz_t(), 2) <= 64 ? 12 : 64;
  const BigInt nm1 = n - 1;
  BigInt x;
  for (std::size_t r = 0; r < rounds; ++r) {
    const BigInt a = detail::kSmallPrimes[r];
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) continue;
    bool composite = true;
    for (mp_bitcnt_t i = 1; i < s; ++i) {
      mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
      if (x == nm1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Smallest prime >= start with exactly `bits` bits; wraps to 2^(bits-1)
/// if the search would overflow the bit length.
inline BigInt next_prime_with_bits(BigInt start, std::size_t bits) {
  if (bits < 2) throw DomainError("modulus needs at least 2 bits");
  BigInt lo = 1;
  mpz_mul_2exp(lo.get_mpz_t(), lo.get_mpz_t(), bits - 1);
  const BigInt hi = lo * 2;
  if (start < lo) start = lo;
  if (bits == 2) return start <= 2 ? BigInt(2) : BigInt(3);
  if (mpz_even_p(start.get_mpz_t())) ++start;
  for (BigInt c = start;; c += 2) {
    if (c >= hi) c = lo + 1;
    if (is_probable_prime(c)) return c;
  }
}

/// Basis with the given modulus and x_i drawn from the seeded stream.
inline Basis generate_with_modulus(std::size_t n, const BigInt& p, std::mt19937_64& rng) {
  if (n < 2) throw DomainError("dimension must be at least 2");
  const std::size_t bits = mpz_sizeinbase(p.get_mpz_t(), 2);
  std::vector<IntVector> rows(n, IntVector(n, 0));
  rows[0][0] = p;
  for (std::size_t i = 1; i < n; ++i) {
    BigInt x;
    do {
      x = detail::random_bits(rng, bits);
    } while (x >= p);
    rows[i][0] = x;
    rows[i][i] = 1;
  }
  return Basis(std::move(rows));
}

inline Basis generate_with_modulus(std::size_t n, const BigInt& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return generate_with_modulus(n, p, rng);
}

/// Prime modulus of the lattice generate(spec) returns.
inline BigInt generator_modulus(std::mt19937_64& rng, std::size_t bits) {
  BigInt start = detail::random_bits(rng, bits);
  mpz_setbit(start.get_mpz_t(), bits - 1);
  mpz_setbit(start.get_mpz_t(), 0);
  return next_prime_with_bits(start, bits);
}

/// Deterministic Goldstein-Mayer style basis; det = p exactly.
inline Basis generate(const GenSpec& spec) {
  if (spec.dimension < 2) throw DomainError("dimension must be at least 2");
  const std::size_t bits = spec.effective_bits();
  if (bits < 2) throw DomainError("modulus needs at least 2 bits");
  std::mt19937_64 rng(spec.seed);
  const BigInt p = generator_modulus(rng, bits);
  return generate_with_modulus(spec.dimension, p, rng);
}

}  // namespace latred
