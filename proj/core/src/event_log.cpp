#include "rmalock/verify/event_log.hpp"

#include <ostream>

namespace rmalock::verify {

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::read_enter: return "read-enter";
    case EventKind::read_exit: return "read-exit";
    case EventKind::write_enter: return "write-enter";
    case EventKind::write_exit: return "write-exit";
    case EventKind::counter_reset: return "counter-reset";
    case EventKind::mode_change: return "mode-change";
  }
  return "?";
}

std::uint64_t EventLog::record(Rank rank, EventKind kind, int level, std::int64_t element,
                               std::int64_t ts_ns, std::int64_t aux) {
  std::lock_guard<std::mutex> lk(mu_);
  std::uint64_t seq = events_.size() + 1;
  events_.push_back(Event{seq, ts_ns, rank, kind, level, element, aux});
  return seq;
}

std::vector<Event> EventLog::snapshot() const {
  std::lock_guard<std::mutex> lk(mu_);
  return events_;
}

std::size_t EventLog::size() const {
  std::lock_guard<std::mutex> lk(mu_);
  return events_.size();
}

void EventLog::clear() {
  std::lock_guard<std::mutex> lk(mu_);
  events_.clear();
}

void EventLog::dump(std::ostream& os) const {
  std::lock_guard<std::mutex> lk(mu_);
  for (const auto& e : events_)
    os << e.seq << ',' << e.rank << ',' << event_name(e.kind) << ',' << e.level << ','
       << e.element << '\n';
}

namespace {
constexpr std::uint64_t kWriterUnit = std::uint64_t{1} << 32;
constexpr std::uint64_t kReaderMask = kWriterUnit - 1;
}  // namespace

void Monitor::reader_enter(Rank rank, std::int64_t counter_index, std::int64_t ts_ns) {
  std::uint64_t v = occ_.fetch_add(1, std::memory_order_seq_cst) + 1;
  log_.record(rank, EventKind::read_enter, 0, counter_index, ts_ns);
  if (live_check_ && (v >> 32) != 0)
    throw ProtocolViolation("reader entered while a writer was active");
}

void Monitor::reader_exit(Rank rank, std::int64_t counter_index, std::int64_t ts_ns) {
  log_.record(rank, EventKind::read_exit, 0, counter_index, ts_ns);
  occ_.fetch_sub(1, std::memory_order_seq_cst);
}

void Monitor::writer_enter(Rank rank, int level, std::int64_t leaf_element,
                           std::int64_t ts_ns, std::int64_t pred) {
  std::uint64_t v = occ_.fetch_add(kWriterUnit, std::memory_order_seq_cst) + kWriterUnit;
  log_.record(rank, EventKind::write_enter, level, leaf_element, ts_ns, pred);
  if (live_check_ && ((v >> 32) > 1 || (v & kReaderMask) != 0))
    throw ProtocolViolation("writer entered a non-exclusive critical section");
}

void Monitor::writer_exit(Rank rank, int level, std::int64_t leaf_element,
                          std::int64_t ts_ns) {
  log_.record(rank, EventKind::write_exit, level, leaf_element, ts_ns);
  occ_.fetch_sub(kWriterUnit, std::memory_order_seq_cst);
}

void Monitor::counter_reset(Rank rank, std::int64_t counter_index, std::int64_t ts_ns) {
  log_.record(rank, EventKind::counter_reset, 0, counter_index, ts_ns);
}

void Monitor::mode_change(Rank rank, std::int64_t ts_ns) {
  log_.record(rank, EventKind::mode_change, 0, 0, ts_ns);
}

OccupancySnapshot Monitor::occupancy() const {
  std::uint64_t v = occ_.load(std::memory_order_seq_cst);
  return OccupancySnapshot{static_cast<int>(v & kReaderMask), static_cast<int>(v >> 32)};
}

}  // namespace rmalock::verify
