#include "rmalock/topo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rmalock::topo {

TopologySpec TopologySpec::uniform(int procs, int levels, std::span<const int> fanout) {
  if (procs < 1) throw ConfigError("process count must be >= 1");
  if (levels < 1) throw ConfigError("level count must be >= 1");
  if (static_cast<int>(fanout.size()) != levels - 1)
    throw ConfigError("fanout list must have levels-1 entries");

  TopologySpec t;
  t.procs_ = procs;
  t.levels_ = levels;
  t.elems_.assign(levels + 1, 1);
  for (int i = 2; i <= levels; ++i) {
    if (fanout[i - 2] < 1) throw ConfigError("fanout entries must be >= 1");
    long long n = static_cast<long long>(t.elems_[i - 1]) * fanout[i - 2];
    if (n > procs) throw ConfigError("more leaf elements than processes");
    t.elems_[i] = static_cast<int>(n);
  }
  if (procs % t.elems_[levels] != 0)
    throw ConfigError("process count must be divisible by the leaf element count");
  return t;
}

int TopologySpec::elements_at(int level) const {
  check_level(level);
  return elems_[level];
}

int TopologySpec::block_size(int level) const {
  check_level(level);
  return procs_ / elems_[level];
}

ElementId TopologySpec::element_of(Rank p, int level) const {
  check_rank(p);
  check_level(level);
  return (p - 1) / block_size(level) + 1;
}

Rank TopologySpec::first_rank_of(int level, ElementId j) const {
  check_level(level);
  if (j < 1 || j > elems_[level]) throw AddressError("element id out of range");
  return static_cast<Rank>((j - 1) * block_size(level) + 1);
}

void TopologySpec::check_rank(Rank p) const {
  if (p < 1 || p > procs_) throw AddressError("rank out of range");
}

void TopologySpec::check_level(int level) const {
  if (level < 1 || level > levels_) throw AddressError("level out of range");
}

CounterMap::CounterMap(int procs, int stride) : procs_(procs), stride_(stride) {
  if (procs < 1) throw ConfigError("process count must be >= 1");
  if (stride < 1) throw ConfigError("counter stride must be >= 1");
  counters_ = (procs + stride - 1) / stride;
}

int CounterMap::counter_index(Rank p) const {
  if (p < 1 || p > procs_) throw AddressError("rank out of range");
  return (p + stride_ - 1) / stride_;
}

Rank CounterMap::host_rank(int index) const {
  if (index < 1 || index > counters_) throw AddressError("counter index out of range");
  return (index - 1) * stride_ + 1;
}

LockParams::LockParams(std::vector<std::int64_t> locality, std::int64_t reader_batch)
    : reader_batch_(reader_batch) {
  if (locality.empty()) throw ConfigError("need at least one locality threshold");
  if (reader_batch < 1) throw ConfigError("reader threshold must be >= 1");
  locality_.assign(1, 0);
  locality_.insert(locality_.end(), locality.begin(), locality.end());
  int n = static_cast<int>(locality.size());
  batch_.assign(n + 2, 1);
  for (int i = n; i >= 1; --i) {
    if (locality_[i] < 1) throw ConfigError("locality thresholds must be >= 1");
    if (batch_[i + 1] > (std::int64_t{1} << 40) / locality_[i])
      throw ConfigError("locality threshold product too large");
    batch_[i] = batch_[i + 1] * locality_[i];
  }
  batch_.resize(n + 1);
}

int WorkloadSpec::writer_count(int procs) const {
  if (writer_fraction < 0.0 || writer_fraction > 1.0)
    throw ConfigError("writer fraction must be in [0,1]");
  return static_cast<int>(std::llround(writer_fraction * procs));
}

std::vector<Role> WorkloadSpec::roles(int procs, std::uint64_t seed) const {
  int writers = writer_count(procs);
  std::vector<Rank> order(procs);
  std::iota(order.begin(), order.end(), 1);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Role> out(procs + 1, Role::reader);
  for (int k = 0; k < writers; ++k) out[order[k]] = Role::writer;
  return out;
}

}  // namespace rmalock::topo
