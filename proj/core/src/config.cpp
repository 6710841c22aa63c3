#include "rmalock/bench/config.hpp"

#include <algorithm>

namespace rmalock::bench {

const char* to_string(BenchKind k) {
  switch (k) {
    case BenchKind::lb: return "lb";
    case BenchKind::ecsb: return "ecsb";
    case BenchKind::sob: return "sob";
    case BenchKind::wcsb: return "wcsb";
    case BenchKind::warb: return "warb";
    case BenchKind::dht: return "dht";
  }
  return "?";
}

const char* to_string(LockKind k) {
  switch (k) {
    case LockKind::spin: return "spin";
    case LockKind::dmcs: return "dmcs";
    case LockKind::rmamcs: return "rmamcs";
    case LockKind::rmarw: return "rmarw";
  }
  return "?";
}

const char* to_string(DhtMode m) {
  switch (m) {
    case DhtMode::atomics: return "atomics";
    case DhtMode::rw: return "rw";
    case DhtMode::mcs: return "mcs";
  }
  return "?";
}

BenchKind bench_from_string(const std::string& s) {
  for (auto k : {BenchKind::lb, BenchKind::ecsb, BenchKind::sob, BenchKind::wcsb,
                 BenchKind::warb, BenchKind::dht})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown benchmark '" + s + "'");
}

LockKind lock_from_string(const std::string& s) {
  for (auto k : {LockKind::spin, LockKind::dmcs, LockKind::rmamcs, LockKind::rmarw})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown lock '" + s + "'");
}

DhtMode dht_mode_from_string(const std::string& s) {
  for (auto m : {DhtMode::atomics, DhtMode::rw, DhtMode::mcs})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown dht mode '" + s + "'");
}

void normalize(BenchConfig& cfg) {
  if (cfg.procs < 1) throw ConfigError("need at least one process");
  if (cfg.iters < 1) throw ConfigError("need at least one iteration per process");
  if (cfg.levels < 1) throw ConfigError("need at least one level");
  if (cfg.fw < 0.0 || cfg.fw > 1.0) throw ConfigError("writer fraction must be in [0,1]");

  if (cfg.fanout.empty()) cfg.fanout.assign(cfg.levels - 1, 2);
  if (static_cast<int>(cfg.fanout.size()) != cfg.levels - 1)
    throw ConfigError("fanout list must have levels-1 entries");

  if (cfg.tl.empty()) cfg.tl.assign(cfg.levels, 4);
  if (static_cast<int>(cfg.tl.size()) != cfg.levels)
    throw ConfigError("locality threshold list must have one entry per level");

  if (cfg.tdc == 0) {
    int leaves = 1;
    for (int f : cfg.fanout) leaves *= f;
    cfg.tdc = cfg.procs / leaves;  // one counter per leaf element
    if (cfg.tdc < 1) cfg.tdc = 1;
  }

  if (cfg.lat_cross.empty()) {
    cfg.lat_cross.assign(cfg.levels - 1, 0);
    std::int64_t d = cfg.lat_intra;
    for (int i = cfg.levels - 1; i >= 1; --i) {
      d *= 10;
      cfg.lat_cross[i - 1] = d;
    }
  }
  if (static_cast<int>(cfg.lat_cross.size()) != cfg.levels - 1)
    throw ConfigError("need one cross-level delay per non-leaf level");

  if (cfg.bench == BenchKind::dht && (cfg.table_size < 1 || cfg.heap_size < 1))
    throw ConfigError("dht table and heap sizes must be >= 1");
}

}  // namespace rmalock::bench
