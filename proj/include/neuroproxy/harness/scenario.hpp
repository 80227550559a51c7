#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "neuroproxy/decl/objectives.hpp"
#include "neuroproxy/harness/channel.hpp"
#include "neuroproxy/harness/dataset.hpp"
#include "neuroproxy/pubsub/broker.hpp"

namespace neuroproxy::harness {

/// Process/channel graph of one scenario. Process kinds:
/// signal_source, lebesgue_sensor, symbol_source, codec_encoder,
/// nc_system, nsp, broker, subscriber_probe.
struct ProcessSpec {
    std::string name;
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
};

struct ChannelSpec {
    std::string name;
    std::string from;  // "process.port"
    std::string to;    // "process.port"
    LatencySpec latency;
    double loss_prob = 0.0;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 0;
    TimeNs duration = 1000 * kNsPerMs;
    std::string objectives_path;  // optional
    std::string dataset_path;     // optional; falls back to the objectives' spec
    TimeNs trial_start = 10 * kNsPerMs;
    std::vector<ProcessSpec> processes;
    std::vector<ChannelSpec> channels;

    void validate() const;  // names unique, endpoints resolve, loss in [0,1]
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig scenario_from_json_text(const std::string& text);

struct ProbeRecord {
    TimeNs delivery_time = 0;
    pubsub::Notification notification;
};

struct ScenarioReport {
    std::string scenario;
    std::uint64_t seed = 0;
    TimeNs duration = 0;

    struct ProcessStats {
        std::string name;
        std::string kind;
        std::uint64_t activations = 0;
        std::uint64_t emitted = 0;
    };
    std::vector<ProcessStats> processes;

    struct ChannelReport {
        std::string name;
        ChannelStats stats;
    };
    std::vector<ChannelReport> channels;

    std::vector<ProbeRecord> probe_records;
    std::vector<bool> trial_outcomes;
    std::optional<decl::ValidationReport> validation;

    /// Fig. 2 interface coverage: every field is exercised by the bundled
    /// end-to-end scenario.
    struct InterfaceCoverage {
        std::uint64_t snn_config_pushes = 0;     // SNN config (kind 0x02)
        std::uint64_t input_spikes = 0;          // Input spike-data
        std::uint64_t output_spike_packets = 0;  // Output spike-data (kind 0x01)
        bool objectives_applied = false;         // Objectives
        std::size_t system_state_neurons = 0;    // System state
        std::string system_state_digest;         // canonical config JSON
        std::uint64_t notifications = 0;         // Event notification
        std::string output_data_query;           // Output data
        nlohmann::ordered_json output_data;
    };
    InterfaceCoverage interfaces;

    std::uint64_t unmapped_spikes = 0;

    nlohmann::ordered_json to_json() const;
    std::string to_json_text() const { return to_json().dump(2) + "\n"; }
};

/// Runs the scenario on a single deterministic discrete-event timeline.
/// Identical (config, seed) pairs produce byte-identical reports.
/// Relative file paths resolve against `base_dir`.
ScenarioReport run_scenario(const ScenarioConfig& config, const std::string& base_dir = ".");

}  // namespace neuroproxy::harness
