#pragma once

#include <cstdint>
#include <vector>

#include "rmalock/rma/window.hpp"
#include "rmalock/sim/executor.hpp"

namespace rmalock::rma {

class Origin;

// Completion handle for one issued operation. Owned by the issuing context;
// must not be shared across contexts.
class Ticket {
 public:
  bool complete() const;
  Rank target() const { return target_; }

 protected:
  friend class Origin;
  Ticket(const Origin* origin, Rank target, std::uint64_t seq)
      : origin_(origin), target_(target), seq_(seq) {}
  const Origin* origin_;
  Rank target_;
  std::uint64_t seq_;
};

// Ticket carrying a fetched value (get/fao/cas). The value slot is only
// valid after the subsequent flush toward the target; strict windows throw
// on early reads.
class ValueTicket : public Ticket {
 public:
  std::int64_t value() const;

 private:
  friend class Origin;
  ValueTicket(const Origin* origin, Rank target, std::uint64_t seq, std::int64_t value)
      : Ticket(origin, target, seq), value_(value) {}
  std::int64_t value_;
};

// Per-context endpoint issuing one-sided accesses against a window. Charges
// the context's virtual clock per operation and tracks which tickets each
// flush completed.
class Origin {
 public:
  Origin(Window& window, sim::Context& ctx);

  Rank rank() const { return ctx_.rank(); }
  sim::Context& ctx() { return ctx_; }
  Window& window() { return window_; }

  // Place src_data atomically in target's window.
  Ticket put(std::int64_t src_data, Rank target, Offset offset);

  // Fetch data atomically from target's window.
  ValueTicket get(Rank target, Offset offset);

  // Apply op atomically using oprd to data at target; nothing returned.
  Ticket accumulate(std::int64_t oprd, Rank target, Offset offset, AtomicOp op);

  // Apply op atomically and return the previous value of the modified data.
  ValueTicket fao(std::int64_t oprd, Rank target, Offset offset, AtomicOp op);

  // Compare cmp_data with the data at target, replace with src_data if equal;
  // returns the previous data either way.
  ValueTicket cas(std::int64_t src_data, std::int64_t cmp_data, Rank target, Offset offset);

  // Complete all pending operations this origin issued toward target.
  void flush(Rank target);

 private:
  friend class Ticket;
  friend class ValueTicket;

  std::atomic<std::int64_t>& checked_cell(Rank target, Offset offset);
  std::uint64_t issue(Rank target);

  Window& window_;
  sim::Context& ctx_;
  std::vector<std::uint64_t> issued_;   // per target rank
  std::vector<std::uint64_t> flushed_;  // per target rank
};

}  // namespace rmalock::rma
