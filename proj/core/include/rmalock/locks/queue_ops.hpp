#pragma once

#include "rmalock/locks/status.hpp"
#include "rmalock/rma/origin.hpp"

namespace rmalock::locks {

// One queue membership: who we are in this queue and where its cells live.
// Node ids are rank values; a node's NEXT/STATUS cells sit in the window of
// the rank equal to its id. Leaf queues enqueue processes themselves; queues
// above enqueue one node per child element, hosted at that element's first
// rank, so whichever process currently leads the element operates its node.
struct QueueRef {
  std::int64_t node_id = 0;
  Rank tail_host = 0;
  Offset next_off = 0;
  Offset status_off = 0;
  Offset tail_off = 0;

  Rank node_rank() const { return static_cast<Rank>(node_id); }
};

// The MCS-queue primitives all four lock protocols are built from.
namespace dq {

// Reset our node and swing the queue tail to it; returns the predecessor's
// node id, or 0 when the queue was empty (the local lock is ours).
inline std::int64_t enqueue(rma::Origin& o, const QueueRef& q) {
  o.put(kNullRank, q.node_rank(), q.next_off);
  o.put(kWait, q.node_rank(), q.status_off);
  o.flush(q.node_rank());
  auto t = o.fao(q.node_id, q.tail_host, q.tail_off, rma::AtomicOp::replace);
  o.flush(q.tail_host);
  return t.value();
}

// Make the predecessor see us.
inline void publish(rma::Origin& o, const QueueRef& q, std::int64_t pred) {
  o.put(q.node_id, static_cast<Rank>(pred), q.next_off);
  o.flush(static_cast<Rank>(pred));
}

// Spin locally until the predecessor hands something over.
inline std::int64_t await_grant(rma::Origin& o, const QueueRef& q) {
  sim::SpinWait sw(o.ctx());
  for (;;) {
    auto t = o.get(q.node_rank(), q.status_off);
    o.flush(q.node_rank());
    std::int64_t s = t.value();
    if (s != kWait) return s;
    sw.pause();
  }
}

inline void set_status(rma::Origin& o, const QueueRef& q, std::int64_t value) {
  o.put(value, q.node_rank(), q.status_off);
  o.flush(q.node_rank());
}

inline std::int64_t read_successor(rma::Origin& o, const QueueRef& q) {
  auto t = o.get(q.node_rank(), q.next_off);
  o.flush(q.node_rank());
  return t.value();
}

// Hand the lock over by writing the successor's status word. Our next
// pointer is dead until this node re-enqueues, so clear it first and the
// queue cells read null whenever nobody is in the protocol.
inline void pass(rma::Origin& o, const QueueRef& q, std::int64_t succ, std::int64_t value) {
  o.put(kNullRank, q.node_rank(), q.next_off);
  o.flush(q.node_rank());
  o.put(value, static_cast<Rank>(succ), q.status_off);
  o.flush(static_cast<Rank>(succ));
}

// No known successor: retract the tail if we are still it, otherwise wait
// for the racing enqueuer to make itself visible. Returns the successor's
// node id, or 0 when the queue was retracted to empty.
inline std::int64_t retract_or_wait(rma::Origin& o, const QueueRef& q) {
  auto t = o.cas(kNullRank, q.node_id, q.tail_host, q.tail_off);
  o.flush(q.tail_host);
  if (t.value() == q.node_id) return 0;
  sim::SpinWait sw(o.ctx());
  for (;;) {
    std::int64_t succ = read_successor(o, q);
    if (succ != kNullRank) return succ;
    sw.pause();
  }
}

}  // namespace dq
}  // namespace rmalock::locks
