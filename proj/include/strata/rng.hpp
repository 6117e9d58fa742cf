#pragma once

#include <array>
#include <cstdint>

#include "strata/types.hpp"

namespace strata {

/// Philox 4x32-10 counter-based generator (Salmon et al. constants).
/// A block is a pure function of (key, counter), so any (trajectory, step)
/// address can be generated independently on any worker.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            const std::array<std::uint32_t, 4>& counter);
};

/// Addressable source of Gaussian increments, keyed by (seed, trajectory).
/// Draws for a given (seed, trajectory, step) triple are identical no matter
/// which worker produces them or in what order.
struct NoisePlan {
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
};

/// Fill `out` (length s) with independent N(0, dt) draws for the given step.
void gaussian_increments(const NoisePlan& plan, std::uint64_t step_index, int s,
                         double dt, Vec& out);

/// Allocating convenience overload.
Vec gaussian_increments(const NoisePlan& plan, std::uint64_t step_index, int s,
                        double dt);

/// Derive a per-algorithm stream seed so different algorithms consume
/// independent noise unless stream sharing is requested.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint32_t tag);

}  // namespace strata
