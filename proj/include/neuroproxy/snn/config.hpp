#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "neuroproxy/spike.hpp"

namespace neuroproxy::snn {

struct NeuronParams {
    std::uint32_t id = 0;
    double threshold = 1.0;      // dimensionless potential
    double tau_mem_ms = 10.0;    // membrane time constant, > 0
    double v_reset = 0.0;
    double refractory_ms = 0.0;  // >= 0

    friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

struct SynapseParams {
    std::uint32_t src = 0;  // neuron id or external input address
    std::uint32_t dst = 0;  // neuron id
    double weight = 0.0;
    double delay_ms = 1.0;  // > 0

    friend bool operator==(const SynapseParams&, const SynapseParams&) = default;
};

/// Structural state of an NC system: topology, weights, time constants,
/// delays, and thresholds. Slowly changing; applied via reconfiguration.
struct SnnConfig {
    std::vector<NeuronParams> neurons;
    std::vector<SynapseParams> synapses;
    std::set<std::uint32_t> input_addresses;
    std::set<std::uint32_t> readout_ids;

    /// Throws ConfigError naming the offending element on duplicate ids,
    /// dangling synapse endpoints, readouts that are not neurons, or
    /// nonpositive time constants/delays.
    void validate() const;

    friend bool operator==(const SnnConfig&, const SnnConfig&) = default;
};

/// Canonical JSON form (fixed field order); the payload carried by AER
/// control packets.
std::string to_json_string(const SnnConfig& config);
SnnConfig config_from_json(const std::string& text);

/// Fast-changing dynamic quantities: materialized membrane potentials and
/// the queue of pending synaptic deliveries.
struct NeuronTransient {
    std::uint32_t id = 0;
    double potential = 0.0;
    TimeNs last_update = 0;
    TimeNs refractory_until = 0;

    friend bool operator==(const NeuronTransient&, const NeuronTransient&) = default;
};

struct PendingDelivery {
    TimeNs time = 0;
    std::uint32_t dst = 0;
    std::uint32_t src = 0;
    double weight = 0.0;

    friend bool operator==(const PendingDelivery&, const PendingDelivery&) = default;
};

struct TransientState {
    TimeNs clock = 0;
    std::vector<NeuronTransient> neurons;     // sorted by id
    std::vector<PendingDelivery> pending;     // ordered by (time, dst, src)

    friend bool operator==(const TransientState&, const TransientState&) = default;
};

std::string to_json_string(const TransientState& state);
TransientState transient_from_json(const std::string& text);

}  // namespace neuroproxy::snn
