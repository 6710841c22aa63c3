#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rmalock/rma/window.hpp"

namespace rmalock::verify {

// Logical timestamps for concurrent histories: strictly increasing across
// all contexts, so interval order is exactly the real-time precedence the
// checker needs.
class LogicalClock {
 public:
  std::uint64_t tick() { return ++t_; }

 private:
  std::atomic<std::uint64_t> t_{0};
};

// One completed operation in a concurrent history: its real-time interval
// plus whatever the model needs to replay it.
template <class Call>
struct Timed {
  std::uint64_t invoke = 0;
  std::uint64_t response = 0;
  Call call;
};

// Exhaustive linearizability search. Tries every sequential ordering of the
// history consistent with real-time precedence until the model explains all
// returned values. Independent of any implementation path: the model is a
// pure sequential specification. Intended for small histories (a handful of
// contexts times a handful of operations).
//
// Model requirements:
//   using Call = ...;                      // copyable op descriptor
//   using State = ...;                     // default-constructed initial, LessThanComparable
//   static bool apply(State&, const Call&) // false if the recorded result is impossible
template <class Model>
bool linearizable(const std::vector<Timed<typename Model::Call>>& history) {
  using State = typename Model::State;
  const std::size_t n = history.size();
  if (n == 0) return true;
  if (n > 32) throw ConfigError("history too large for exhaustive search");

  const std::uint32_t all = n == 32 ? 0xffffffffu : (1u << n) - 1;
  // States already proven dead ends for a given linearized set.
  std::map<std::pair<std::uint32_t, State>, bool> seen;

  struct Frame {
    std::uint32_t done;
    State state;
  };
  std::vector<Frame> stack;
  stack.push_back({0, State{}});

  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.done == all) return true;
    auto key = std::make_pair(f.done, f.state);
    auto [it, fresh] = seen.emplace(key, true);
    if (!fresh) continue;

    // Minimal ops: not yet linearized and not preceded (in real time) by
    // another unlinearized op.
    std::uint64_t horizon = UINT64_MAX;
    for (std::size_t i = 0; i < n; ++i)
      if (!(f.done & (1u << i))) horizon = std::min(horizon, history[i].response);
    for (std::size_t i = 0; i < n; ++i) {
      if (f.done & (1u << i)) continue;
      if (history[i].invoke > horizon) continue;
      State next = f.state;
      if (Model::apply(next, history[i].call)) stack.push_back({f.done | (1u << i), next});
    }
  }
  return false;
}

// Sequential specification of one window cell under the six access types.
struct CellModel {
  enum class Kind : std::uint8_t { put, get, acc_sum, acc_replace, fao_sum, fao_replace, cas };
  struct Call {
    Kind kind;
    std::int64_t operand = 0;   // put/accumulate/fao operand, cas src_data
    std::int64_t compare = 0;   // cas cmp_data
    std::int64_t result = 0;    // returned value where the op returns one
  };
  using State = std::int64_t;

  static bool apply(State& s, const Call& c) {
    switch (c.kind) {
      case Kind::put: s = c.operand; return true;
      case Kind::get: return c.result == s;
      case Kind::acc_sum: s += c.operand; return true;
      case Kind::acc_replace: s = c.operand; return true;
      case Kind::fao_sum:
        if (c.result != s) return false;
        s += c.operand;
        return true;
      case Kind::fao_replace:
        if (c.result != s) return false;
        s = c.operand;
        return true;
      case Kind::cas:
        if (c.result != s) return false;
        if (s == c.compare) s = c.operand;
        return true;
    }
    return false;
  }
};

using CellHistory = std::vector<Timed<CellModel::Call>>;

inline bool cell_history_linearizable(const CellHistory& history) {
  return linearizable<CellModel>(history);
}

}  // namespace rmalock::verify
