#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neuroproxy/spike.hpp"

namespace neuroproxy::nsp {

/// Binds one readout address to an emission rule: when at least min_count
/// mapped spikes arrive within the horizon, a notification fires on the
/// topic (and, if snapshot is set, a transient snapshot is stored).
struct MappingRule {
    std::uint32_t readout_address = 0;
    std::string topic;
    std::uint32_t min_count = 1;  // k >= 1
    TimeNs horizon = kNsPerMs;    // H > 0
    bool snapshot = true;

    friend bool operator==(const MappingRule&, const MappingRule&) = default;
};

/// Vertex/edge labels the proxy uses to populate its data model.
struct GraphBindings {
    std::string event_label = "Event";
    std::string snapshot_label = "Snapshot";
    std::string readout_label = "Readout";
    std::string snapshot_edge = "snapshot";
    std::string source_edge = "source";

    friend bool operator==(const GraphBindings&, const GraphBindings&) = default;
};

struct ProxyMapping {
    std::vector<MappingRule> rules;  // readout addresses distinct
    GraphBindings bindings;

    friend bool operator==(const ProxyMapping&, const ProxyMapping&) = default;
};

}  // namespace neuroproxy::nsp
