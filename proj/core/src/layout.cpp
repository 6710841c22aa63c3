#include "rmalock/topo/layout.hpp"

#include <set>

namespace rmalock::topo {

WindowLayout::WindowLayout(int levels) : levels_(levels) {
  if (levels < 1) throw ConfigError("layout needs at least one level");
}

bool WindowLayout::validate() const {
  std::set<Offset> seen;
  auto add = [&](Offset o) {
    return o >= 0 && o < words_per_rank() && seen.insert(o).second;
  };
  for (int i = 1; i <= levels_; ++i) {
    if (!add(queue_next(i)) || !add(queue_status(i)) || !add(queue_tail(i)))
      return false;
  }
  return add(arrive()) && add(depart()) && add(mcs_next()) && add(mcs_status()) &&
         add(mcs_tail()) && add(spin_flag()) && add(shared_word()) &&
         static_cast<int>(seen.size()) == words_per_rank();
}

}  // namespace rmalock::topo
