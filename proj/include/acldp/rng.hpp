#pragma once

// Philox4x32-10 counter-based generator. A draw is a pure function of
// (key, counter), so every (seed, chain, step, mode) gets its own stream
// without shared state.

#include <array>
#include <cstdint>

namespace acldp {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// Two independent standard normals per call (Box-Muller on the four words).
struct NormalPair
{
    double a;
    double b;
};

class NoiseStream
{
  public:
    NoiseStream(std::uint64_t seed, std::uint32_t chain);

    // Normals for modes 2*pair+1 and 2*pair+2 at time step `step`.
    NormalPair normals(std::uint64_t step, std::uint32_t pair) const;

    std::uint64_t seed() const { return seed_; }
    std::uint32_t chain() const { return chain_; }

  private:
    std::uint64_t seed_;
    std::uint32_t chain_;
    PhiloxKey key_;
};

// Uniform in (0, 1] from a 32-bit word pair (53 bits).
double uniform_open_closed(std::uint32_t hi, std::uint32_t lo);

}  // namespace acldp
