#include "rmalock/verify/quiescence.hpp"

#include "rmalock/locks/status.hpp"

namespace rmalock::verify {

namespace {

std::string at(Rank r, Offset o) {
  return " at (" + std::to_string(r) + "," + std::to_string(o) + ")";
}

}  // namespace

QuiescenceReport check_quiescence(rma::Window& window, const topo::TopologySpec& topo,
                                  const topo::WindowLayout& layout,
                                  const topo::CounterMap* counters) {
  using locks::kWriteSentinel;
  for (Rank r = 1; r <= topo.procs(); ++r) {
    for (int i = 1; i <= topo.levels(); ++i) {
      if (auto v = window.peek(r, layout.queue_next(i)); v != kNullRank)
        return {false, "queue next not null" + at(r, layout.queue_next(i))};
      if (auto v = window.peek(r, layout.queue_tail(i)); v != kNullRank)
        return {false, "queue tail not null" + at(r, layout.queue_tail(i))};
      if (auto v = window.peek(r, layout.queue_status(i)); v < 0)
        return {false, "status word rests blocked (" + std::to_string(v) + ")" +
                           at(r, layout.queue_status(i))};
    }
    if (auto v = window.peek(r, layout.mcs_next()); v != kNullRank)
      return {false, "flat queue next not null" + at(r, layout.mcs_next())};
    if (auto v = window.peek(r, layout.mcs_tail()); v != kNullRank)
      return {false, "flat queue tail not null" + at(r, layout.mcs_tail())};
    if (auto v = window.peek(r, layout.mcs_status()); v < 0)
      return {false, "flat queue status rests blocked" + at(r, layout.mcs_status())};
    if (auto v = window.peek(r, layout.spin_flag()); v != 0)
      return {false, "test-and-set flag still held" + at(r, layout.spin_flag())};
  }

  if (counters) {
    for (int j = 1; j <= counters->counters(); ++j) {
      Rank host = counters->host_rank(j);
      std::int64_t arrive = window.peek(host, layout.arrive());
      std::int64_t depart = window.peek(host, layout.depart());
      if (arrive >= kWriteSentinel)
        return {false, "counter " + std::to_string(j) + " rests in write mode"};
      if (arrive != depart)
        return {false, "counter " + std::to_string(j) + " unbalanced: arrive " +
                           std::to_string(arrive) + ", depart " + std::to_string(depart)};
      // Fold the matched arrivals away, as a reset would.
      window.poke(host, layout.arrive(), arrive - depart);
      window.poke(host, layout.depart(), 0);
      if (window.peek(host, layout.arrive()) != 0 || window.peek(host, layout.depart()) != 0)
        return {false, "counter " + std::to_string(j) + " did not fold to (0,0)"};
    }
  }
  return {};
}

}  // namespace rmalock::verify
