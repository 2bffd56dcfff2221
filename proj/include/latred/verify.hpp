#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "latred/basis.hpp"
#include "latred/lll.hpp"
#include "latred/numerics.hpp"
#include "latred/qr.hpp"

namespace latred {

/// Independent audit of a reduction result: R is recomputed from scratch
/// and both LLL conditions are tested with relative slack kVerifySlack.
struct ReductionCheck {
  bool same_lattice = false;
  bool size_reduced = false;
  bool lovasz = false;
  std::string detail;

  bool ok() const { return same_lattice && size_reduced && lovasz; }
};

inline constexpr double kVerifySlack = 1e-9;

/// Size-reduction and Lovasz conditions of `b` on a fresh R at `ctx`.
inline ReductionCheck check_reduced(const Basis& b, double delta, PrecisionCtx ctx = PrecisionCtx::quad()) {
  ReductionCheck c;
  const RFactor r = qr_decompose(b, ctx, QrOptions{false, false}).r;
  const std::size_t n = b.rank();
  const PrecisionCtx w = ctx.widened(8);
  c.size_reduced = true;
  c.lovasz = true;
  MPFloat half_slack(0.5 + kVerifySlack, w);
  MPFloat delta_slack(delta * (1 - kVerifySlack), w);
  for (std::size_t j = 1; j < n && c.size_reduced; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (abs(r(i, j)) > MPFloat(r(i, i), w) * half_slack) {
        c.size_reduced = false;
        c.detail = "size condition fails at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
        break;
      }
    }
  for (std::size_t i = 1; i < n; ++i) {
    MPFloat lhs = MPFloat(r(i, i), w) * r(i, i) + MPFloat(r(i - 1, i), w) * r(i - 1, i);
    MPFloat rhs = MPFloat(r(i - 1, i - 1), w) * r(i - 1, i - 1) * delta_slack;
    if (lhs < rhs) {
      c.lovasz = false;
      if (c.detail.empty()) c.detail = "Lovasz condition fails at " + std::to_string(i + 1);
      break;
    }
  }
  return c;
}

/// same_lattice(input, output) plus check_reduced(output).
inline ReductionCheck verify_reduction(const Basis& input, const Basis& output, double delta,
                                       PrecisionCtx ctx = PrecisionCtx::quad()) {
  ReductionCheck c = check_reduced(output, delta, ctx);
  c.same_lattice = same_lattice(input, output);
  if (!c.same_lattice) c.detail = "output generates a different lattice";
  return c;
}

}  // namespace latred
