#pragma once

#include <vector>

#include "rmalock/locks/queue_ops.hpp"
#include "rmalock/topo/layout.hpp"

namespace rmalock::locks {

// The queue memberships rank p operates, one per level (index by level,
// slot 0 unused). At the leaf level the process enqueues itself; at every
// level above it operates the node of its child element, so the element's
// current leader acts on the element's behalf. A climbing writer therefore
// releases exactly the chain its cohort holds, regardless of which process
// originally enqueued each node.
inline std::vector<QueueRef> make_queue_chain(const topo::TopologySpec& topo,
                                              const topo::WindowLayout& layout,
                                              Rank p) {
  int n = topo.levels();
  std::vector<QueueRef> chain(n + 1);
  for (int i = 1; i <= n; ++i) {
    QueueRef q;
    q.node_id = i == n ? p : topo.first_rank_of(i + 1, topo.element_of(p, i + 1));
    q.tail_host = topo.tail_host(i, topo.element_of(p, i));
    q.next_off = layout.queue_next(i);
    q.status_off = layout.queue_status(i);
    q.tail_off = layout.queue_tail(i);
    chain[i] = q;
  }
  return chain;
}

}  // namespace rmalock::locks
