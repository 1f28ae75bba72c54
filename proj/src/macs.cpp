#include "gvt/macs.hpp"

namespace gvt::macs {

namespace {
std::atomic<bool> g_counting{false};
std::atomic<std::uint64_t> g_total{0};
}  // namespace

void set_counting(bool on) { g_counting.store(on, std::memory_order_relaxed); }
bool counting() { return g_counting.load(std::memory_order_relaxed); }
void add(std::uint64_t n) { g_total.fetch_add(n, std::memory_order_relaxed); }
std::uint64_t total() { return g_total.load(std::memory_order_relaxed); }
void reset() { g_total.store(0, std::memory_order_relaxed); }

}  // namespace gvt::macs
