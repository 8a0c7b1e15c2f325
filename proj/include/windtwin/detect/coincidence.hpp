#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "windtwin/errors.hpp"
#include "windtwin/ingest/frame.hpp"
#include "windtwin/ingest/schema.hpp"
#include "windtwin/time.hpp"

namespace windtwin::detect {

// Half-open downtime interval [start, end); duration = end - start.
struct FaultInterval {
  Timestamp start = 0;
  Timestamp end = 0;

  std::int64_t duration() const { return end - start; }
};

struct FaultLog {
  std::vector<FaultInterval> faults;  // chronological

  // First fault starting at or after `t` with duration >= min_duration.
  std::optional<FaultInterval> next_fault(Timestamp t, std::int64_t min_duration) const {
    for (const auto& f : faults) {
      if (f.start >= t && f.duration() >= min_duration) return f;
    }
    return std::nullopt;
  }
};

// Downtime intervals recovered from the turbine codes of a minute series. A
// run of down frames [first, last] becomes the interval
// [first, last + 1 minute).
inline FaultLog faults_from_series(const ingest::Series& series,
                                   const ingest::StatusCodeMap& codes,
                                   ingest::DowntimeField field = ingest::DowntimeField::status_code) {
  FaultLog log;
  bool in_fault = false;
  for (const auto& frame : series) {
    const bool down = codes.is_down(frame.code(field));
    if (down && !in_fault) {
      log.faults.push_back({frame.timestamp, frame.timestamp + kSecondsPerMinute});
      in_fault = true;
    } else if (down) {
      log.faults.back().end = frame.timestamp + kSecondsPerMinute;
    } else {
      in_fault = false;
    }
  }
  return log;
}

// Probability that a randomly placed anomaly lands at most delta_t before the
// next fault of duration >= min_duration: the fraction of eligible timesteps
// t_i whose next qualifying fault starts within delta_t.
inline double coincidence_probability(std::int64_t delta_t, std::int64_t min_duration,
                                      std::span<const Timestamp> eligible_times,
                                      const FaultLog& faults) {
  if (eligible_times.empty())
    throw ProbabilityError("coincidence probability is undefined: no eligible timesteps");
  std::size_t hits = 0;
  for (const Timestamp t : eligible_times) {
    const auto f = faults.next_fault(t, min_duration);
    if (f && f->start - t <= delta_t) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(eligible_times.size());
}

}  // namespace windtwin::detect
