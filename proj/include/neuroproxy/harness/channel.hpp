#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neuroproxy/harness/rng.hpp"
#include "neuroproxy/spike.hpp"

namespace neuroproxy::harness {

/// Channel latency: fixed, or uniform in [low, high].
struct LatencySpec {
    TimeNs low = 0;
    TimeNs high = 0;

    static LatencySpec fixed(TimeNs ns) { return {ns, ns}; }
    bool is_fixed() const { return low == high; }

    friend bool operator==(const LatencySpec&, const LatencySpec&) = default;
};

/// Best-effort channel model: each message is dropped independently with
/// loss_prob and otherwise delayed per the latency spec.
struct ChannelModel {
    LatencySpec latency;
    double loss_prob = 0.0;

    /// Delivery time for a message sent at `sent`, or nullopt when lost.
    /// Consumes one loss draw and, for jittered channels, one latency draw.
    std::optional<TimeNs> transmit(TimeNs sent, Rng& rng) const;
};

struct ChannelStats {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
};

/// Applies the channel model to a time-ordered event batch: survivors are
/// shifted to their delivery times and re-sorted. Deterministic for a
/// given rng stream.
std::vector<SpikeEvent> simulate_channel(std::span<const SpikeEvent> events,
                                         const LatencySpec& latency, double loss_prob, Rng& rng,
                                         ChannelStats* stats = nullptr);

}  // namespace neuroproxy::harness
