#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace neuroproxy {

/// Nanoseconds since scenario start. All event timing uses integer
/// nanoseconds so that event ordering never depends on floating-point
/// rounding.
using TimeNs = std::uint64_t;

constexpr TimeNs kNsPerMs = 1'000'000;
constexpr TimeNs kNsPerUs = 1'000;

/// Converts a millisecond-valued configuration field to integer
/// nanoseconds (1 ms = 10^6 ns), rounding to the nearest nanosecond.
inline TimeNs ns_from_ms(double ms)
{
    return static_cast<TimeNs>(std::llround(ms * static_cast<double>(kNsPerMs)));
}

inline double ms_from_ns(TimeNs ns)
{
    return static_cast<double>(ns) / static_cast<double>(kNsPerMs);
}

/// A unary address-event: the address of the spike source plus its
/// physical timestamp. Streams of events are kept ordered by
/// (timestamp, address).
struct SpikeEvent {
    std::uint32_t address = 0;
    TimeNs timestamp = 0;

    friend constexpr bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
    friend constexpr auto operator<=>(const SpikeEvent& a, const SpikeEvent& b)
    {
        if (auto c = a.timestamp <=> b.timestamp; c != 0) {
            return c;
        }
        return a.address <=> b.address;
    }
};

}  // namespace neuroproxy
