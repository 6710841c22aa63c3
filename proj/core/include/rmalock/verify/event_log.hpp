#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <vector>

#include "rmalock/types.hpp"

namespace rmalock::verify {

enum class EventKind : std::uint8_t {
  read_enter,
  read_exit,
  write_enter,
  write_exit,
  counter_reset,
  mode_change,
};

const char* event_name(EventKind k);

struct Event {
  std::uint64_t seq;    // global order, strictly increasing from 1
  std::int64_t ts_ns;   // issuing context's virtual clock (informational)
  Rank rank;
  EventKind kind;
  std::int32_t level;   // level the lock was granted at; 0 where not applicable
  std::int64_t element; // leaf element for writers, counter index for readers/resets
  std::int64_t aux;     // protocol extra (queue predecessor for enters); not dumped
};

// Globally ordered append-only record of lock activity. Appends serialize on
// one mutex; this orders logging but leaves the protocols' window operations
// untouched. Benchmarks simply run without a log attached.
class EventLog {
 public:
  std::uint64_t record(Rank rank, EventKind kind, int level, std::int64_t element,
                       std::int64_t ts_ns, std::int64_t aux = 0);

  std::vector<Event> snapshot() const;
  std::size_t size() const;
  void clear();

  // Newline-delimited "seq,rank,event,level,element" records.
  void dump(std::ostream& os) const;

 private:
  mutable std::mutex mu_;
  std::vector<Event> events_;
};

struct OccupancySnapshot {
  int readers = 0;
  int writers = 0;
};

// Live instrumentation shared by all lock implementations: occupancy
// accounting with an immediate mutual-exclusion check, plus the event log
// the post-hoc auditors replay. Lock code reports enters *after* the grant
// was observed and exits *before* the first release-side window operation,
// so log order is consistent with the protocol's own synchronization.
class Monitor {
 public:
  explicit Monitor(bool live_check = true) : live_check_(live_check) {}

  EventLog& log() { return log_; }
  const EventLog& log() const { return log_; }

  void reader_enter(Rank rank, std::int64_t counter_index, std::int64_t ts_ns);
  void reader_exit(Rank rank, std::int64_t counter_index, std::int64_t ts_ns);
  void writer_enter(Rank rank, int level, std::int64_t leaf_element, std::int64_t ts_ns,
                    std::int64_t pred = 0);
  void writer_exit(Rank rank, int level, std::int64_t leaf_element, std::int64_t ts_ns);
  void counter_reset(Rank rank, std::int64_t counter_index, std::int64_t ts_ns);
  void mode_change(Rank rank, std::int64_t ts_ns);

  OccupancySnapshot occupancy() const;

 private:
  void bump(std::int64_t delta_packed);

  bool live_check_;
  // writers in the high half, readers in the low half: one atomic so the
  // invariant check sees a consistent pair.
  std::atomic<std::uint64_t> occ_{0};
  EventLog log_;
};

}  // namespace rmalock::verify
