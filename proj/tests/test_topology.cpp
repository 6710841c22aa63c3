#include "doctest.h"

#include <random>
#include <set>

#include "rmalock/topo/layout.hpp"
#include "rmalock/topo/topology.hpp"

using namespace rmalock;
using topo::CounterMap;
using topo::LockParams;
using topo::TopologySpec;

TEST_CASE("element mapping uses contiguous rank blocks") {
  // 64 processes over 2 racks x 2 nodes: 16 per leaf.
  auto t = TopologySpec::uniform(64, 3, std::vector<int>{2, 2});
  CHECK(t.elements_at(1) == 1);
  CHECK(t.elements_at(2) == 2);
  CHECK(t.elements_at(3) == 4);
  CHECK(t.element_of(20, 3) == 2);  // ranks 17..32 form the second leaf block
  for (Rank p : {1, 20, 64}) CHECK(t.element_of(p, 1) == 1);
  for (int i = 1; i <= 3; ++i) CHECK(t.element_of(1, i) == 1);
}

TEST_CASE("rejects non-divisible process counts") {
  CHECK_THROWS_AS(TopologySpec::uniform(10, 2, std::vector<int>{4}), ConfigError);
  CHECK_THROWS_AS(TopologySpec::uniform(2, 3, std::vector<int>{2, 2}), ConfigError);
  CHECK_THROWS_AS(TopologySpec::uniform(4, 2, std::vector<int>{2, 2}), ConfigError);
  CHECK_NOTHROW(TopologySpec::uniform(12, 2, std::vector<int>{4}));
}

TEST_CASE("counter map places one counter per stride block") {
  CounterMap cm(64, 16);
  CHECK(cm.counters() == 4);
  CHECK(cm.counter_index(17) == 2);
  CHECK(cm.counter_rank(17) == 17);
  CHECK(cm.counter_rank(5) == 1);
  CHECK(cm.counter_rank(64) == 49);

  CounterMap per_rank(8, 1);
  for (Rank p = 1; p <= 8; ++p) CHECK(per_rank.counter_rank(p) == p);

  // Every rank in one stride block maps to the same host.
  CounterMap blocks(32, 8);
  for (int j = 1; j <= blocks.counters(); ++j) {
    Rank host = blocks.host_rank(j);
    for (Rank p = (j - 1) * 8 + 1; p <= j * 8; ++p) CHECK(blocks.counter_rank(p) == host);
  }
}

TEST_CASE("tail hosts are the lowest rank of each element") {
  auto t = TopologySpec::uniform(64, 3, std::vector<int>{2, 2});
  CHECK(t.tail_host(3, 2) == 17);
  CHECK(t.tail_host(1, 1) == 1);
  for (int level = 1; level <= 3; ++level) {
    std::set<Rank> hosts;
    for (ElementId j = 1; j <= t.elements_at(level); ++j)
      CHECK(hosts.insert(t.tail_host(level, j)).second);  // injective per level
  }
}

TEST_CASE("levels partition the ranks and nest") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int levels = 1 + static_cast<int>(rng() % 3);
    std::vector<int> fanout;
    int leaves = 1;
    for (int i = 0; i < levels - 1; ++i) {
      fanout.push_back(1 + static_cast<int>(rng() % 3));
      leaves *= fanout.back();
    }
    int procs = leaves * (1 + static_cast<int>(rng() % 5));
    auto t = TopologySpec::uniform(procs, levels, fanout);

    for (int i = 1; i <= levels; ++i) {
      // Partition property: block sizes add up and ids stay in range.
      std::vector<int> count(t.elements_at(i) + 1, 0);
      for (Rank p = 1; p <= procs; ++p) {
        ElementId e = t.element_of(p, i);
        REQUIRE(e >= 1);
        REQUIRE(e <= t.elements_at(i));
        ++count[e];
      }
      for (ElementId j = 1; j <= t.elements_at(i); ++j) CHECK(count[j] == t.block_size(i));

      // Refinement: sharing a level-i element implies sharing level i-1.
      if (i > 1)
        for (Rank p = 2; p <= procs; ++p)
          if (t.element_of(p, i) == t.element_of(p - 1, i))
            CHECK(t.element_of(p, i - 1) == t.element_of(p - 1, i - 1));
    }
  }
}

TEST_CASE("lock params derive the writer batch as the threshold product") {
  LockParams p({4, 4}, 8);
  CHECK(p.writer_batch() == 16);
  CHECK(p.batch_below(1) == 16);
  CHECK(p.batch_below(2) == 4);
  CHECK(p.reader_batch() == 8);

  LockParams three({2, 3, 5}, 1);
  CHECK(three.writer_batch() == 30);
  CHECK(three.batch_below(2) == 15);
  CHECK(three.batch_below(3) == 5);

  CHECK_THROWS_AS(LockParams({0, 4}, 8), ConfigError);
  CHECK_THROWS_AS(LockParams({4, 4}, 0), ConfigError);
  CHECK_THROWS_AS(LockParams({}, 1), ConfigError);
}

TEST_CASE("workload roles are exact and seed-stable") {
  topo::WorkloadSpec w{0.25};
  CHECK(w.writer_count(16) == 4);
  CHECK(topo::WorkloadSpec{0.002}.writer_count(32) == 0);
  CHECK(topo::WorkloadSpec{1.0}.writer_count(7) == 7);

  auto a = w.roles(16, 42);
  auto b = w.roles(16, 42);
  auto c = w.roles(16, 43);
  CHECK(a == b);
  int writers = 0;
  for (Rank p = 1; p <= 16; ++p) writers += a[p] == topo::Role::writer;
  CHECK(writers == 4);
  CHECK(a != c);  // overwhelmingly likely under a different seed
}

TEST_CASE("window layout assigns every field a distinct address") {
  for (int levels : {1, 2, 3, 4}) {
    topo::WindowLayout l(levels);
    CHECK(l.validate());
  }
  topo::WindowLayout l(2);
  CHECK(l.queue_next(1) == 0);
  CHECK(l.queue_status(1) == 1);
  CHECK(l.arrive() == 4);
  CHECK(l.depart() == 5);
  CHECK_THROWS_AS(l.queue_tail(3), AddressError);
}
