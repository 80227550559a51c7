#include "neuroproxy/harness/channel.hpp"

#include <algorithm>
#include <cmath>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::harness {

std::optional<TimeNs> ChannelModel::transmit(TimeNs sent, Rng& rng) const
{
    if (loss_prob > 0.0 && rng.next_unit() < loss_prob) {
        return std::nullopt;
    }
    TimeNs delay = latency.low;
    if (!latency.is_fixed()) {
        const double span = static_cast<double>(latency.high - latency.low);
        delay = latency.low + static_cast<TimeNs>(std::llround(rng.next_unit() * span));
    }
    return sent + delay;
}

std::vector<SpikeEvent> simulate_channel(std::span<const SpikeEvent> events,
                                         const LatencySpec& latency, double loss_prob, Rng& rng,
                                         ChannelStats* stats)
{
    if (loss_prob < 0.0 || loss_prob > 1.0) {
        throw ScenarioError("loss probability must lie in [0, 1]");
    }
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp < events[i - 1].timestamp) {
            throw ScenarioError("channel input events must be time-ordered");
        }
    }
    const ChannelModel model{latency, loss_prob};
    std::vector<SpikeEvent> delivered;
    delivered.reserve(events.size());
    for (const SpikeEvent& e : events) {
        if (stats != nullptr) {
            ++stats->sent;
        }
        if (const auto at = model.transmit(e.timestamp, rng)) {
            delivered.push_back({e.address, *at});
            if (stats != nullptr) {
                ++stats->delivered;
            }
        } else if (stats != nullptr) {
            ++stats->dropped;
        }
    }
    std::stable_sort(delivered.begin(), delivered.end(),
                     [](const SpikeEvent& a, const SpikeEvent& b) {
                         return a.timestamp < b.timestamp;
                     });
    return delivered;
}

}  // namespace neuroproxy::harness
