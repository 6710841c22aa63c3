#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>

#include "rmalock/rma/latency.hpp"
#include "rmalock/types.hpp"

namespace rmalock::rma {

enum class AtomicOp : std::uint8_t { sum, replace };

// Whether reading a ticket value before the corresponding flush is an error
// (strict) or merely unchecked (relaxed). Returned values are identical in
// both modes.
enum class Strictness : std::uint8_t { strict, relaxed };

// The emulated shared memory: one array of 64-bit words per rank, addressed
// by (rank, offset) with ranks 1..P. All cells start at zero, which doubles
// as the null-rank encoding, so freshly created windows describe empty
// queues and idle counters.
//
// Every access is applied atomically to the backing store when issued; the
// per-target flush is a completion fence that validates tickets. Network
// asynchrony is modeled on the virtual clock, not by deferring effects.
//
// With a latency model attached, a remote access also occupies its target
// for the access duration: concurrent remote operations against one rank
// serialize on the target's clock horizon, the way a NIC's atomic unit
// would. Accesses to the issuing rank's own window bypass that queue.
// Safe for fully concurrent access from all simulated contexts.
class Window {
 public:
  Window(int ranks, int words_per_rank,
         std::optional<LatencyModel> latency = std::nullopt,
         Strictness strictness = Strictness::strict);

  int ranks() const { return ranks_; }
  int words_per_rank() const { return words_; }
  Strictness strictness() const { return strictness_; }
  const std::optional<LatencyModel>& latency() const { return latency_; }

  // Direct backing-store access for harness setup and post-run verification.
  // Not an RMA operation: bypasses tickets, clocks and flush semantics.
  std::int64_t peek(Rank rank, Offset offset) const;
  void poke(Rank rank, Offset offset, std::int64_t value);

  std::atomic<std::int64_t>& cell(Rank rank, Offset offset);
  const std::atomic<std::int64_t>& cell(Rank rank, Offset offset) const;

  // Earliest virtual time the target can serve the next remote access.
  std::atomic<std::int64_t>& busy_horizon(Rank rank);

 private:
  int ranks_;
  int words_;
  Strictness strictness_;
  std::optional<LatencyModel> latency_;
  std::unique_ptr<std::atomic<std::int64_t>[]> cells_;
  std::unique_ptr<std::atomic<std::int64_t>[]> busy_;
};

}  // namespace rmalock::rma
