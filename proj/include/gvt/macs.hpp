#pragma once

#include <atomic>
#include <cstdint>

namespace gvt::macs {

// Global multiply-accumulate counter used by the measured-FLOP mode. Kernels
// report their MAC volume only while counting is on, so the hot path costs a
// single relaxed bool load.
void set_counting(bool on);
bool counting();
void add(std::uint64_t n);
std::uint64_t total();
void reset();

}  // namespace gvt::macs
