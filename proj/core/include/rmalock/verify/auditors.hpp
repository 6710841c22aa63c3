#pragma once

#include <span>
#include <string>

#include "rmalock/topo/topology.hpp"
#include "rmalock/verify/event_log.hpp"

namespace rmalock::verify {

struct Verdict {
  bool ok = true;
  std::string detail;
  std::uint64_t at_seq = 0;

  explicit operator bool() const { return ok; }
  static Verdict fail(std::uint64_t seq, std::string what) {
    return Verdict{false, std::move(what), seq};
  }
};

// Replays the log against the occupancy invariant: at every prefix either at
// most one writer and no readers, or any number of readers and no writer.
// Deterministic; fails at the first offending event.
Verdict audit_mutual_exclusion(std::span<const Event> events);

struct ThresholdAuditConfig {
  // Consecutive writer entries allowed between two points where the lock was
  // offered to the readers (a counter reset) or a reader entered. 0 skips.
  std::int64_t writer_batch = 0;
  // Reader entries allowed on one counter between resets of that counter.
  std::int64_t reader_batch = 0;
  // When set, consecutive writer entries staying inside one level-i element
  // are bounded by params->batch_below(i) per segment (same segmentation as
  // the writer batch). Sound for counter-backed locks; for the exclusive
  // tree lock it presumes contenders from other elements are always waiting.
  const topo::TopologySpec* topo = nullptr;
  const topo::LockParams* params = nullptr;
};

// Checks the batch bounds the thresholds promise. All checks replay the
// globally ordered log; see ThresholdAuditConfig for the exact conditions.
Verdict audit_thresholds(std::span<const Event> events, const ThresholdAuditConfig& cfg);

// For single-queue locks whose enter events carry the enqueue predecessor:
// critical-section order must equal the tail-swap order. Every enter either
// starts a fresh queue (no predecessor) or names the previous enterer.
Verdict audit_queue_fifo(std::span<const Event> events);

}  // namespace rmalock::verify
