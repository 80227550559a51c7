#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "neuroproxy/decl/objectives.hpp"
#include "neuroproxy/graph/graph.hpp"
#include "neuroproxy/graph/query.hpp"
#include "neuroproxy/nsp/device_link.hpp"
#include "neuroproxy/nsp/mapping.hpp"
#include "neuroproxy/pubsub/broker.hpp"
#include "neuroproxy/softstate/store.hpp"

namespace neuroproxy::nsp {

struct ProxyConfig {
    std::string instance_id = "nsp-0";
    softstate::RefreshParams softstate_defaults{100 * kNsPerMs, 3};
    TimeNs snapshot_max_age = 1000 * kNsPerMs;  // offload cutoff
};

/// The schema the proxy's data model uses: Event, Snapshot, and Readout
/// vertices linked by snapshot/source edges.
graph::GraphSchema proxy_graph_schema(const GraphBindings& bindings);

/// Neuromorphic-system proxy: virtualizes exactly one NC system. Caches
/// the last applied structural config, keeps refresh-driven soft state
/// and a property-graph data model, turns readout spikes into
/// notifications by count-over-horizon thresholding, and serves graph
/// queries without requiring device liveness.
///
/// Mutations are serialized internally; queries run on graph snapshots.
class NspProxy {
public:
    NspProxy(ProxyConfig config, std::shared_ptr<DeviceLink> link,
             pubsub::Broker* broker = nullptr);

    /// Compiles and pushes objectives. On device failure the previous
    /// config and mapping stay active (atomicity); on success the per-rule
    /// windows are cleared.
    snn::SnnConfig apply_objectives(const decl::ObjectiveDoc& doc);

    /// Ingests one readout spike. Unmapped readouts are counted and
    /// ignored. Returns the notifications emitted (also published to the
    /// broker when one is attached).
    std::vector<pubsub::Notification> on_output_spike(const SpikeEvent& event);

    /// Last applied config, served from the proxy cache (no device round
    /// trip).
    snn::SnnConfig get_system_state() const;

    /// Runs a query on a graph snapshot; vertices whose backing soft-state
    /// entry has expired at `now` are filtered out (with their subtrees).
    graph::ResultTree serve_query(const graph::GraphQuery& query, TimeNs now) const;

    /// Serializes snapshot vertices older than the configured age to the
    /// sink and prunes them. A sink failure leaves the graph unpruned.
    std::size_t offload_snapshots(std::ostream& sink, TimeNs now);

    /// Expires soft state; returns removed keys.
    std::vector<std::string> sweep(TimeNs now);

    const std::string& instance_id() const { return config_.instance_id; }
    const ProxyMapping& mapping() const { return mapping_; }
    std::uint64_t unmapped_spikes() const { return unmapped_spikes_; }
    std::uint64_t notifications_emitted() const { return notification_seq_; }
    std::uint64_t snapshot_failures() const { return snapshot_failures_; }

    /// Snapshot copy of the data model (tests, serve mode).
    graph::PropertyGraph graph_snapshot() const;
    softstate::SoftStateStore& softstate() { return softstate_; }

private:
    struct RuleState {
        MappingRule rule;
        std::deque<TimeNs> window;  // spike times within (T - H, T]
    };

    void record_event(const SpikeEvent& event, const RuleState& state,
                      const std::string& event_id, std::uint64_t count);

    ProxyConfig config_;
    std::shared_ptr<DeviceLink> link_;
    pubsub::Broker* broker_;

    snn::SnnConfig current_config_;
    ProxyMapping mapping_;
    std::map<std::uint32_t, RuleState> rules_;  // by readout address

    softstate::SoftStateStore softstate_;
    graph::PropertyGraph graph_;
    std::map<std::string, std::string> soft_backed_;  // vertex id -> soft key

    std::uint64_t notification_seq_ = 0;
    std::uint64_t unmapped_spikes_ = 0;
    std::uint64_t snapshot_failures_ = 0;

    mutable std::mutex mutex_;
};

/// Parses an offload document back into vertex/edge form and inserts it;
/// returns the number of snapshots ingested.
std::size_t ingest_offloaded(graph::PropertyGraph& graph, const std::string& document);

}  // namespace neuroproxy::nsp
