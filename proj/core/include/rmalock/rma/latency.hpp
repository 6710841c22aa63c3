#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rmalock/topo/topology.hpp"

namespace rmalock::rma {

// Per-operation delay charged to the issuing context's virtual clock.
// The cost of an access depends on the deepest hierarchy level whose element
// contains both origin and target: same leaf element (including self access)
// costs intra_ns, anything routed through a level-i element costs cross_ns
// for that level. Flushes are free; delays attach to operation issue.
class LatencyModel {
 public:
  LatencyModel() = default;

  // cross_ns[i-1] applies when the deepest common level is i (i in 1..N-1).
  LatencyModel(topo::TopologySpec topo, std::int64_t intra_ns,
               std::vector<std::int64_t> cross_ns);

  // Every access costs the same regardless of placement.
  static LatencyModel uniform(std::int64_t ns);

  std::int64_t delay_ns(Rank origin, Rank target) const;

  // Same deepest-level element (always true for self access): the traffic
  // stays inside a shared-memory domain and bypasses the target's remote
  // service queue.
  bool is_local(Rank origin, Rank target) const;

  std::int64_t intra_ns() const { return intra_ns_; }

 private:
  std::optional<topo::TopologySpec> topo_;
  std::int64_t intra_ns_ = 0;
  std::vector<std::int64_t> cross_ns_;
};

}  // namespace rmalock::rma
