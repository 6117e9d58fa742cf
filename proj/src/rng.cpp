#include "strata/rng.hpp"

#include <cmath>

namespace strata {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t out0 = hi1 ^ c[1] ^ k0;
  const std::uint32_t out2 = hi0 ^ c[3] ^ k1;
  c[0] = out0;
  c[1] = lo1;
  c[2] = out2;
  c[3] = lo0;
}

inline double to_unit(std::uint64_t bits) {
  // (0, 1): never 0 so log() is safe.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::uint64_t key,
                                               const std::array<std::uint32_t, 4>& counter) {
  std::uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c[0], c[1], c[2], c[3]};
}

void gaussian_increments(const NoisePlan& plan, std::uint64_t step_index, int s,
                         double dt, Vec& out) {
  out.resize(s);
  const double scale = std::sqrt(dt);
  const std::uint32_t traj_lo = static_cast<std::uint32_t>(plan.trajectory);
  const std::uint32_t traj_hi = static_cast<std::uint32_t>(plan.trajectory >> 32);
  const std::uint32_t step_lo = static_cast<std::uint32_t>(step_index);
  const int n_blocks = (s + 1) / 2;
  for (int b = 0; b < n_blocks; ++b) {
    const auto blk = Philox4x32::block(
        plan.seed, {traj_lo, traj_hi, step_lo, static_cast<std::uint32_t>(b)});
    const std::uint64_t u64a =
        (static_cast<std::uint64_t>(blk[0]) << 32) | blk[1];
    const std::uint64_t u64b =
        (static_cast<std::uint64_t>(blk[2]) << 32) | blk[3];
    const double r = std::sqrt(-2.0 * std::log(to_unit(u64a)));
    const double phi = kTwoPi * to_unit(u64b);
    out[2 * b] = scale * r * std::cos(phi);
    if (2 * b + 1 < s) out[2 * b + 1] = scale * r * std::sin(phi);
  }
}

Vec gaussian_increments(const NoisePlan& plan, std::uint64_t step_index, int s,
                        double dt) {
  Vec out;
  gaussian_increments(plan, step_index, s, dt, out);
  return out;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint32_t tag) {
  // splitmix64 finalizer over (seed, tag); tag 0 returns a mixed but
  // tag-stable stream so shared-stream mode can just bypass this call.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(tag) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace strata
