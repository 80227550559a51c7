#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "neuroproxy/snn/config.hpp"
#include "neuroproxy/spike.hpp"

namespace neuroproxy::snn {

/// Event-driven simulator of a leaky integrate-and-fire network.
///
/// Deliveries are processed in ascending (time, destination, source)
/// order; a delivery of weight w to a non-refractory neuron decays the
/// membrane potential exponentially over the elapsed gap and deposits w.
/// Crossing the threshold (V >= theta) emits a spike, resets the
/// potential, starts the refractory period, and schedules downstream
/// deliveries after the synaptic delays. Fully deterministic.
///
/// Instances are single-threaded; distinct instances share no state.
class NetworkInstance {
public:
    /// Validates and applies the configuration; clock starts at 0 with all
    /// potentials at v_reset.
    explicit NetworkInstance(SnnConfig config);

    /// Enqueues one delivery per outgoing synapse of each event's source
    /// address. Events must be time-ordered, at or after the clock, and
    /// from declared input addresses.
    void inject(std::span<const SpikeEvent> events);

    /// Processes every pending delivery up to `until` and advances the
    /// clock. Returns the spikes of readout neurons in (time, address)
    /// order.
    std::vector<SpikeEvent> advance(TimeNs until);

    /// The currently applied structural configuration.
    const SnnConfig& snapshot_structural() const { return config_; }

    /// Consistent transient snapshot at the current clock with all decays
    /// materialized.
    TransientState snapshot_transient() const;

    /// Applies a new structural configuration in place: the clock is kept,
    /// potentials reset to v_reset, and pending deliveries are dropped.
    void reconfigure(SnnConfig config);

    TimeNs clock() const { return clock_; }

    /// Delivery time of the earliest pending event, if any.
    std::optional<TimeNs> next_pending_time() const;

private:
    struct Neuron {
        double threshold;
        double tau_ns;
        double v_reset;
        TimeNs refractory_ns;
        double potential;
        TimeNs last_update;
        TimeNs refractory_until;
    };

    struct Synapse {
        std::uint32_t dst_index;
        double weight;
        TimeNs delay_ns;
    };

    struct Delivery {
        TimeNs time;
        std::uint32_t dst;  // neuron id
        std::uint32_t src;  // neuron id or input address
        double weight;
        std::uint64_t seq;  // insertion order, final determinism tie-break

        bool operator<(const Delivery& other) const
        {
            if (time != other.time) return time < other.time;
            if (dst != other.dst) return dst < other.dst;
            if (src != other.src) return src < other.src;
            return seq < other.seq;
        }
    };

    void rebuild(SnnConfig config);
    void enqueue_fanout(std::uint32_t source_address, TimeNs spike_time);
    void push_delivery(Delivery d);
    Delivery pop_delivery();

    SnnConfig config_;
    std::vector<Neuron> neurons_;
    std::unordered_map<std::uint32_t, std::uint32_t> index_of_;      // neuron id -> index
    std::unordered_map<std::uint32_t, std::vector<Synapse>> fanout_; // source address -> synapses
    std::vector<bool> is_readout_;                                   // by neuron index
    std::vector<Delivery> queue_;  // min-heap via std::push_heap/pop_heap
    std::uint64_t next_seq_ = 0;
    TimeNs clock_ = 0;
};

}  // namespace neuroproxy::snn
