#include "acldp/rng.hpp"

#include <cmath>
#include <numbers>

namespace acldp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    std::uint64_t const p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double uniform_open_closed(std::uint32_t hi, std::uint32_t lo)
{
    std::uint64_t const bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 1.0) * 0x1p-53;
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint32_t chain)
    : seed_(seed),
      chain_(chain),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
{
}

NormalPair NoiseStream::normals(std::uint64_t step, std::uint32_t pair) const
{
    PhiloxCounter const ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                            pair, chain_};
    PhiloxCounter const w = philox4x32(ctr, key_);
    double const u1 = uniform_open_closed(w[0], w[1]);
    double const u2 = uniform_open_closed(w[2], w[3]);
    double const r = std::sqrt(-2.0 * std::log(u1));
    double const a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace acldp
