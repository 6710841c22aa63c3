#pragma once

#include <string>

#include "rmalock/rma/window.hpp"
#include "rmalock/topo/layout.hpp"
#include "rmalock/topo/topology.hpp"

namespace rmalock::verify {

struct QuiescenceReport {
  bool ok = true;
  std::string detail;
  explicit operator bool() const { return ok; }
};

// Post-run window inspection: with no process inside any protocol, every
// queue tail and next pointer must read null, every status word must rest at
// a non-blocking value, the test-and-set flag must be clear, and every
// counter must have arrivals matching departures with no write sentinel.
// Balanced counters are then folded back to exact (0,0) — the same
// subtraction a reset performs — so repeated suites start from a pristine
// window and any in-flight reader or stuck sentinel shows up as a failure.
QuiescenceReport check_quiescence(rma::Window& window, const topo::TopologySpec& topo,
                                  const topo::WindowLayout& layout,
                                  const topo::CounterMap* counters);

}  // namespace rmalock::verify
