#include "rmalock/dht/volume.hpp"

namespace rmalock::dht {

Volume::Volume(rma::Window& window, Config cfg) : window_(window), cfg_(cfg) {
  if (cfg_.table_size < 1 || cfg_.heap_size < 1)
    throw ConfigError("volume table and heap must hold at least one entry");
  if (cfg_.owner < 1 || cfg_.owner > window.ranks())
    throw ConfigError("volume owner outside the window");
  if (cfg_.base < 0 || cfg_.base + words_needed(cfg_) > window.words_per_rank())
    throw ConfigError("volume does not fit in the window");
}

int Volume::slot_of(std::int64_t value) const {
  std::int64_t m = value % cfg_.table_size;
  return static_cast<int>(m < 0 ? m + cfg_.table_size : m);
}

Offset Volume::heap_value(std::int64_t k) const {
  // Heap indices are 1-based; 0 is the null link.
  return static_cast<Offset>(cfg_.base + 2 * cfg_.table_size + (k - 1));
}

Offset Volume::heap_link(std::int64_t k) const {
  return static_cast<Offset>(cfg_.base + 2 * cfg_.table_size + cfg_.heap_size + (k - 1));
}

void Volume::insert(rma::Origin& origin, std::int64_t value) const {
  if (value == 0) throw ConfigError("zero is the empty-slot encoding; store nonzero values");
  const Rank owner = cfg_.owner;
  const int s = slot_of(value);

  auto claimed = origin.cas(value, 0, owner, slot(s));
  origin.flush(owner);
  if (claimed.value() == 0) return;

  // Collision: take a heap cell and hook it in front of the chain.
  auto prev_free = origin.fao(1, owner, next_free(), rma::AtomicOp::sum);
  origin.flush(owner);
  std::int64_t k = prev_free.value() + 1;
  if (k > cfg_.heap_size) throw CapacityError("overflow heap exhausted");

  origin.put(value, owner, heap_value(k));
  origin.flush(owner);
  sim::SpinWait sw(origin.ctx());
  for (;;) {
    auto tail = origin.get(owner, last_of(s));
    origin.flush(owner);
    origin.put(tail.value(), owner, heap_link(k));
    origin.flush(owner);
    auto swung = origin.cas(k, tail.value(), owner, last_of(s));
    origin.flush(owner);
    if (swung.value() == tail.value()) return;
    sw.pause();
  }
}

bool Volume::lookup(rma::Origin& origin, std::int64_t value) const {
  const Rank owner = cfg_.owner;
  const int s = slot_of(value);

  auto head = origin.get(owner, slot(s));
  auto tail = origin.get(owner, last_of(s));
  origin.flush(owner);
  if (head.value() == value) return true;

  std::int64_t k = tail.value();
  while (k != 0) {
    auto v = origin.get(owner, heap_value(k));
    auto link = origin.get(owner, heap_link(k));
    origin.flush(owner);
    if (v.value() == value) return true;
    k = link.value();
  }
  return false;
}

std::map<std::int64_t, std::int64_t> Volume::contents() const {
  std::map<std::int64_t, std::int64_t> out;
  for (int s = 0; s < cfg_.table_size; ++s) {
    if (std::int64_t v = window_.peek(cfg_.owner, slot(s)); v != 0) ++out[v];
    std::int64_t k = window_.peek(cfg_.owner, last_of(s));
    while (k != 0) {
      ++out[window_.peek(cfg_.owner, heap_value(k))];
      k = window_.peek(cfg_.owner, heap_link(k));
    }
  }
  return out;
}

}  // namespace rmalock::dht
