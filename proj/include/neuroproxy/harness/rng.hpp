#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace neuroproxy::harness {

/// Deterministic random stream. Raw mt19937_64 output is mapped to
/// doubles/integers here instead of through std distributions, which are
/// implementation-defined; reports must be byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for a channel: perturbing one channel's draws
    /// never affects another's.
    static Rng for_channel(std::uint64_t seed, std::string_view channel_name);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double next_unit()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace neuroproxy::harness
