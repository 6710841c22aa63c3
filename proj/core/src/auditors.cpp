#include "rmalock/verify/auditors.hpp"

#include <map>
#include <vector>

namespace rmalock::verify {

Verdict audit_mutual_exclusion(std::span<const Event> events) {
  int readers = 0, writers = 0;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::read_enter:
        ++readers;
        if (writers > 0)
          return Verdict::fail(e.seq, "reader entered while a writer was active");
        break;
      case EventKind::read_exit:
        if (--readers < 0) return Verdict::fail(e.seq, "reader exit without enter");
        break;
      case EventKind::write_enter:
        ++writers;
        if (writers > 1 || readers > 0)
          return Verdict::fail(e.seq, "writer entered a non-exclusive critical section");
        break;
      case EventKind::write_exit:
        if (--writers < 0) return Verdict::fail(e.seq, "writer exit without enter");
        break;
      default:
        break;
    }
  }
  return {};
}

Verdict audit_thresholds(std::span<const Event> events, const ThresholdAuditConfig& cfg) {
  std::int64_t writer_run = 0;
  std::map<std::int64_t, std::int64_t> reader_runs;  // per counter index
  const int levels = cfg.topo ? cfg.topo->levels() : 0;
  const bool locality = cfg.topo && cfg.params && levels >= 2;
  std::vector<std::int64_t> run_elem(levels + 1, 0);
  std::vector<std::int64_t> run_len(levels + 1, 0);

  auto break_writer_runs = [&] {
    writer_run = 0;
    for (int i = 2; i <= levels; ++i) {
      run_elem[i] = 0;
      run_len[i] = 0;
    }
  };

  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::write_enter: {
        ++writer_run;
        if (cfg.writer_batch > 0 && writer_run > cfg.writer_batch)
          return Verdict::fail(e.seq,
                               "writer run of " + std::to_string(writer_run) +
                                   " exceeds the writer batch bound " +
                                   std::to_string(cfg.writer_batch));
        if (locality) {
          for (int i = 2; i <= levels; ++i) {
            ElementId elem = cfg.topo->element_of(e.rank, i);
            if (elem == run_elem[i]) {
              ++run_len[i];
            } else {
              run_elem[i] = elem;
              run_len[i] = 1;
            }
            if (run_len[i] > cfg.params->batch_below(i))
              return Verdict::fail(e.seq,
                                   "locality run of " + std::to_string(run_len[i]) +
                                       " entries inside level-" + std::to_string(i) +
                                       " element " + std::to_string(elem) +
                                       " exceeds the bound " +
                                       std::to_string(cfg.params->batch_below(i)));
          }
        }
        break;
      }
      case EventKind::read_enter: {
        break_writer_runs();
        std::int64_t r = ++reader_runs[e.element];
        if (cfg.reader_batch > 0 && r > cfg.reader_batch)
          return Verdict::fail(e.seq,
                               "reader run of " + std::to_string(r) + " on counter " +
                                   std::to_string(e.element) +
                                   " exceeds the reader batch bound " +
                                   std::to_string(cfg.reader_batch));
        break;
      }
      case EventKind::counter_reset:
        break_writer_runs();
        reader_runs[e.element] = 0;
        break;
      default:
        break;
    }
  }
  return {};
}

Verdict audit_queue_fifo(std::span<const Event> events) {
  Rank last_enterer = 0;
  for (const auto& e : events) {
    if (e.kind != EventKind::write_enter) continue;
    if (e.aux != kNullRank && e.aux != last_enterer)
      return Verdict::fail(
          e.seq, "entry order diverges from the enqueue order (expected predecessor " +
                     std::to_string(e.aux) + " to enter previously, saw " +
                     std::to_string(last_enterer) + ")");
    last_enterer = e.rank;
  }
  return {};
}

}  // namespace rmalock::verify
