#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "latred/basis.hpp"
#include "latred/enumeration.hpp"
#include "latred/errors.hpp"
#include "latred/lll.hpp"
#include "latred/numerics.hpp"
#include "latred/profile.hpp"

namespace latred {

/// Emitted after every completed tour.
struct TourReport {
  std::size_t tour = 0;  // 1-based
  MPFloat b1_norm;
  std::size_t insertions = 0;
  StageProfile profile;  // cumulative
};

struct BKZParams {
  std::size_t beta = 20;
  double delta = 0.99;
  PrecisionCtx ctx = PrecisionCtx::quad();
  std::size_t max_tours = 40;
  std::optional<std::uint64_t> enum_node_budget;
  std::function<void(const TourReport&)> on_tour;
};

struct BKZOutcome {
  Basis basis;
  std::size_t tours_completed = 0;
  std::size_t insertions = 0;
  bool converged = false;
  StageProfile profile;
  BoundReport bound_report;
};

namespace detail {

inline void check_bkz_params(const BKZParams& p, std::size_t n) {
  check_delta(p.delta);
  if (p.beta < 2 || p.beta > n)
    throw DomainError("block size must satisfy 2 <= beta <= n, got beta=" + std::to_string(p.beta) +
                      ", n=" + std::to_string(n));
  if (p.max_tours == 0) throw DomainError("max_tours must be positive");
}

inline IntVector combine_rows(const std::vector<IntVector>& rows, std::size_t k, const IntVector& u) {
  IntVector v(rows[k].size(), 0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (sgn(u[j]) == 0) continue;
    for (std::size_t l = 0; l < v.size(); ++l) mpz_addmul(v[l].get_mpz_t(), u[j].get_mpz_t(), rows[k + j][l].get_mpz_t());
  }
  return v;
}

// Inserts v = sum u_j b_{k+j} at position k of an engine whose prefix
// [0, k) is valid, then LLL-reduces the n+1 vectors from stage k, deleting
// the single zero vector the dependency produces.
inline void insert_and_purge_engine(ReductionEngine& eng, std::vector<IntVector>& rows, std::size_t k,
                                    const IntVector& u) {
  const std::size_t n = rows.size();
  eng.insert_row(k, combine_rows(rows, k, u));
  const std::size_t removed = eng.run(k, n + 1, true);
  if (removed != 1 || rows.size() != n)
    throw ConsistencyError("dependency removal produced " + std::to_string(removed) +
                           " zero vectors, expected exactly one");
}

}  // namespace detail

/// Inserts v = sum_j u_j b_{k+j} (0-based k) and removes the resulting
/// linear dependence with a dependency-tolerant LLL pass. The prefix [0, k)
/// is LLL-reduced first; for an LLL-reduced input it is left untouched.
inline Basis insert_and_purge(const Basis& b, std::size_t k, const IntVector& u, const BKZParams& p) {
  check_delta(p.delta);
  if (u.empty() || k + u.size() > b.rank()) throw DimensionError("insertion block out of range");
  if (std::all_of(u.begin(), u.end(), [](const BigInt& x) { return sgn(x) == 0; }))
    throw DomainError("insertion coefficients must be nonzero");
  std::vector<IntVector> rows = b.rows();
  StageProfile prof;
  detail::ReductionEngine eng(rows, p.ctx, p.delta, prof);
  eng.run(0, k, false);
  detail::insert_and_purge_engine(eng, rows, k, u);
  return Basis(std::move(rows));
}

/// Block Korkine-Zolotarev reduction. Tours run k = 0..n-2 over blocks
/// [k, min(k+beta, n)); an enumerated block minimum nu is inserted when
/// delta * r_kk^2 > nu. Stops after a tour with no insertion.
inline BKZOutcome bkz_reduce(const Basis& b, const BKZParams& p) {
  const std::size_t n = b.rank();
  detail::check_bkz_params(p, n);
  const auto start = Clock::now();
  BKZOutcome out;
  std::vector<IntVector> rows = b.rows();
  detail::ReductionEngine eng(rows, p.ctx, p.delta, out.profile);
  eng.set_iteration_cap(default_iteration_cap(n, b.max_bits()) * (p.max_tours + 1));
  eng.run(0, n, false);

  for (std::size_t tour = 1; tour <= p.max_tours; ++tour) {
    std::size_t tour_insertions = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t len = std::min(k + p.beta, n) - k;
      std::vector<std::vector<double>> block(len, std::vector<double>(len, 0.0));
      for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i; j < len; ++j) block[i][j] = eng.r(k + i, k + j).to_double();
      const double rkk_sq = block[0][0] * block[0][0];
      std::optional<EnumResult> found;
      std::uint64_t nodes = 0;
      {
        StageTimer timer(out.profile.enum_time);
        try {
          found = enumerate_block(block, rkk_sq, p.enum_node_budget, nodes);
        } catch (const EnumBudgetExceeded& e) {
          found = e.best();
          nodes = *p.enum_node_budget;
        }
      }
      out.profile.enum_nodes += nodes;
      if (found && p.delta * rkk_sq > found->norm_sq.to_double()) {
        detail::insert_and_purge_engine(eng, rows, k, found->coeffs);
        ++tour_insertions;
      }
    }
    out.insertions += tour_insertions;
    out.tours_completed = tour;
    if (p.on_tour) {
      TourReport rep;
      rep.tour = tour;
      rep.b1_norm = mpf_sqrt(mpf_from_bigint(norm_sq(rows[0]), p.ctx), p.ctx);
      rep.insertions = tour_insertions;
      rep.profile = out.profile;
      rep.profile.close(Clock::now() - start);
      p.on_tour(rep);
    }
    if (tour_insertions == 0) {
      out.converged = true;
      break;
    }
  }
  out.basis = Basis(std::move(rows));
  out.bound_report = approximation_ratio(out.basis, p.ctx);
  out.profile.close(Clock::now() - start);
  return out;
}

}  // namespace latred
