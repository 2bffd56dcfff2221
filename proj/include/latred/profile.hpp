#pragma once

#include <chrono>
#include <cstdint>

namespace latred {

using Clock = std::chrono::steady_clock;
using Duration = std::chrono::duration<double>;

/// Wall-time accumulators per reduction stage. `other_time` absorbs whatever
/// the instrumented stages did not cover, so the components always sum to
/// the measured total.
struct StageProfile {
  Duration qr_time{0};
  Duration size_reduce_time{0};
  Duration enum_time{0};
  Duration other_time{0};
  std::uint64_t enum_nodes = 0;

  Duration total() const { return qr_time + size_reduce_time + enum_time + other_time; }

  StageProfile& operator+=(const StageProfile& o) {
    qr_time += o.qr_time;
    size_reduce_time += o.size_reduce_time;
    enum_time += o.enum_time;
    other_time += o.other_time;
    enum_nodes += o.enum_nodes;
    return *this;
  }

  /// Sets other_time so that total() equals `wall`.
  void close(Duration wall) {
    Duration covered = qr_time + size_reduce_time + enum_time;
    other_time = wall > covered ? wall - covered : Duration{0};
  }
};

/// Adds the lifetime of the scope to one accumulator.
class StageTimer {
 public:
  explicit StageTimer(Duration& slot) : slot_(slot), start_(Clock::now()) {}
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;
  ~StageTimer() { slot_ += Clock::now() - start_; }

 private:
  Duration& slot_;
  Clock::time_point start_;
};

inline double to_ms(Duration d) { return d.count() * 1e3; }

}  // namespace latred
