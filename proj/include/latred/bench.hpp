#pragma once

// Experiment harnesses: per-stage BKZ timing across dimensions and the QR
// precision sweep. Both emit CSV with fixed headers.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "latred/basis.hpp"
#include "latred/bkz.hpp"
#include "latred/latgen.hpp"
#include "latred/numerics.hpp"
#include "latred/profile.hpp"
#include "latred/qr.hpp"
#include "latred/verify.hpp"

namespace latred {

inline constexpr const char* kProfileCsvHeader =
    "dimension,beta,qr_ms,sizered_ms,enum_ms,other_ms,enum_nodes,total_ms";
inline constexpr const char* kSweepCsvHeader = "dimension,mantissa_bits,residual,succeeded,bound_ratio,wall_ms";

struct ProfileRow {
  std::size_t dimension = 0;
  std::size_t beta = 0;
  StageProfile profile;
};

struct SweepRow {
  std::size_t dimension = 0;
  long mantissa_bits = 0;
  MPFloat residual;
  bool reduction_succeeded = false;
  std::optional<MPFloat> bound_ratio;
  Duration wall_time{0};
  std::string failure;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written to per-index slots, so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// bkz_reduce with its stage timers; the profile is also in the outcome.
inline std::pair<BKZOutcome, StageProfile> profile_reduction(const Basis& b, const BKZParams& p) {
  BKZOutcome out = bkz_reduce(b, p);
  StageProfile prof = out.profile;
  return {std::move(out), prof};
}

/// Precision used when the caller does not choose one: 113 bits up to
/// dimension 30, else 8 bits per dimension.
inline PrecisionCtx default_precision(std::size_t n) {
  return n <= 30 ? PrecisionCtx::quad() : PrecisionCtx(static_cast<long>(8 * n));
}

/// One row per (lattice, precision). QR residual at that precision, then a full
/// BKZ whose R factor runs at that precision (enumeration stays in double).
/// A failed cell is recorded, never rethrown.
inline std::vector<SweepRow> precision_sweep(const std::vector<GenSpec>& specs, const std::vector<long>& precisions,
                                             const BKZParams& p, std::size_t jobs = 1) {
  if (specs.empty() || precisions.empty()) throw DomainError("sweep needs at least one lattice and one precision");
  std::vector<SweepRow> rows(specs.size() * precisions.size());
  std::vector<Basis> lattices(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) lattices[s] = generate(specs[s]);
  parallel_for(rows.size(), jobs, [&](std::size_t idx) {
    const std::size_t s = idx / precisions.size();
    const Basis& b = lattices[s];
    SweepRow row;
    row.dimension = specs[s].dimension;
    row.mantissa_bits = precisions[idx % precisions.size()];
    const PrecisionCtx ctx(row.mantissa_bits);
    const auto start = Clock::now();
    row.residual = orthogonality_residual(b, qr_decompose(b, ctx, QrOptions{false, false}).r, ctx);
    try {
      BKZParams cell = p;
      cell.ctx = ctx;
      cell.beta = std::min(p.beta, b.rank());
      cell.on_tour = nullptr;
      BKZOutcome out = bkz_reduce(b, cell);
      ReductionCheck chk = verify_reduction(b, out.basis, cell.delta);
      row.reduction_succeeded = chk.ok();
      if (!chk.ok()) row.failure = chk.detail;
      row.bound_ratio = out.bound_report.ratio;
    } catch (const Error& e) {
      row.reduction_succeeded = false;
      row.failure = e.what();
    }
    row.wall_time = Clock::now() - start;
    rows[idx] = std::move(row);
  });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::pair(a.dimension, a.mantissa_bits) < std::pair(b.dimension, b.mantissa_bits);
  });
  return rows;
}

/// Profiles BKZ on generate({dim, default bits, seed}) for each dimension.
inline std::vector<ProfileRow> profile_dimensions(const std::vector<std::size_t>& dims, std::uint64_t seed,
                                                  const BKZParams& p, std::size_t jobs = 1,
                                                  std::optional<PrecisionCtx> precision = std::nullopt) {
  std::vector<ProfileRow> rows(dims.size());
  parallel_for(dims.size(), jobs, [&](std::size_t i) {
    const Basis b = generate(GenSpec{dims[i], 0, seed});
    BKZParams cell = p;
    cell.beta = std::min(p.beta, dims[i]);
    cell.ctx = precision.value_or(default_precision(dims[i]));
    cell.on_tour = nullptr;
    rows[i] = ProfileRow{dims[i], cell.beta, profile_reduction(b, cell).second};
  });
  return rows;
}

namespace detail {

inline std::string fmt_ms(Duration d) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << to_ms(d);
  return s.str();
}

}  // namespace detail

inline void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows) {
  out << kProfileCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& p = r.profile;
    out << r.dimension << ',' << r.beta << ',' << detail::fmt_ms(p.qr_time) << ','
        << detail::fmt_ms(p.size_reduce_time) << ',' << detail::fmt_ms(p.enum_time) << ','
        << detail::fmt_ms(p.other_time) << ',' << p.enum_nodes << ',' << detail::fmt_ms(p.total()) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.dimension << ',' << r.mantissa_bits << ',' << r.residual.to_string(6) << ','
        << (r.reduction_succeeded ? "true" : "false") << ','
        << (r.bound_ratio ? r.bound_ratio->to_string(8) : std::string("nan")) << ','
        << detail::fmt_ms(r.wall_time) << '\n';
  }
}

}  // namespace latred
