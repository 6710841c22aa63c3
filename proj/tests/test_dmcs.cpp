#include "doctest.h"

#include "lock_test_util.hpp"
#include "rmalock/locks/dmcs.hpp"

using namespace rmalock;
using testutil::Rig;

TEST_CASE("uncontended acquire enters through the empty tail") {
  auto rig = Rig::flat(2);
  locks::DmcsLock lock(rig.window, rig.layout, 1, &rig.monitor);
  sim::Executor::run(2, rig.exec(sim::Mode::lockstep, 1), [&](sim::Context& ctx) {
    if (ctx.rank() != 2) return;
    auto h = lock.handle(ctx);
    h.acquire();
    CHECK(h.held());
    // While held with no contenders, the tail names the holder.
    CHECK(rig.window.peek(1, rig.layout.mcs_tail()) == 2);
    h.release();
    CHECK(!h.held());
    CHECK(rig.window.peek(1, rig.layout.mcs_tail()) == kNullRank);
  });
  CHECK(rig.quiescence().ok);
}

TEST_CASE("misuse is a protocol violation") {
  auto rig = Rig::flat(1);
  locks::DmcsLock lock(rig.window, rig.layout);
  sim::Executor::run(1, rig.exec(sim::Mode::lockstep, 1), [&](sim::Context& ctx) {
    auto h = lock.handle(ctx);
    CHECK_THROWS_AS(h.release(), ProtocolViolation);
    h.acquire();
    CHECK_THROWS_AS(h.acquire(), ProtocolViolation);
    h.release();
  });
}

TEST_CASE("entry order follows the tail-swap order") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto rig = Rig::flat(3);
    locks::DmcsLock lock(rig.window, rig.layout, 1, &rig.monitor);
    sim::Executor::run(3, rig.exec(sim::Mode::lockstep, seed), [&](sim::Context& ctx) {
      auto h = lock.handle(ctx);
      for (int i = 0; i < 5; ++i) {
        h.acquire();
        h.release();
      }
    });
    auto events = rig.monitor.log().snapshot();
    CHECK(verify::audit_mutual_exclusion(events).ok);
    CHECK(verify::audit_queue_fifo(events).ok);
    CHECK(rig.quiescence().ok);
  }
}

TEST_CASE("contended stress keeps exclusion and restores quiescence") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto rig = Rig::flat(8);
    locks::DmcsLock lock(rig.window, rig.layout, 1, &rig.monitor);
    auto mode = seed % 2 ? sim::Mode::concurrent : sim::Mode::lockstep;
    sim::Executor::run(8, rig.exec(mode, seed), [&](sim::Context& ctx) {
      auto h = lock.handle(ctx);
      for (int i = 0; i < 40; ++i) {
        h.acquire();
        h.release();
      }
    });
    auto events = rig.monitor.log().snapshot();
    CHECK(events.size() == 2 * 8 * 40);
    CHECK(verify::audit_mutual_exclusion(events).ok);
    CHECK(verify::audit_queue_fifo(events).ok);
    CHECK(rig.quiescence().ok);
  }
}

TEST_CASE("test-and-set lock excludes and rests clear") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto rig = Rig::flat(6);
    locks::TasSpinLock lock(rig.window, rig.layout, 1, &rig.monitor);
    auto mode = seed % 2 ? sim::Mode::concurrent : sim::Mode::lockstep;
    sim::Executor::run(6, rig.exec(mode, seed), [&](sim::Context& ctx) {
      auto h = lock.handle(ctx);
      for (int i = 0; i < 30; ++i) {
        h.acquire();
        h.release();
      }
    });
    CHECK(verify::audit_mutual_exclusion(rig.monitor.log().snapshot()).ok);
    CHECK(rig.window.peek(1, rig.layout.spin_flag()) == 0);
    CHECK(rig.quiescence().ok);
  }
}
