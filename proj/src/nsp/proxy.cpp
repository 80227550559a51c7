#include "neuroproxy/nsp/proxy.hpp"

#include <algorithm>

#include <json.hpp>

#include "neuroproxy/errors.hpp"
#include "neuroproxy/log.hpp"

namespace neuroproxy::nsp {

using nlohmann::ordered_json;

graph::GraphSchema proxy_graph_schema(const GraphBindings& bindings)
{
    graph::GraphSchema schema;
    schema.vertex_labels[bindings.event_label].properties = {
        {"topic", ValueType::kString}, {"readout", ValueType::kInt},
        {"count", ValueType::kInt},    {"time", ValueType::kInt},
        {"instance", ValueType::kString},
    };
    schema.vertex_labels[bindings.snapshot_label].properties = {
        {"time", ValueType::kInt},
        {"state", ValueType::kString},
    };
    schema.vertex_labels[bindings.readout_label].properties = {
        {"address", ValueType::kInt},
    };
    schema.edge_labels[bindings.snapshot_edge];
    schema.edge_labels[bindings.source_edge];
    return schema;
}

NspProxy::NspProxy(ProxyConfig config, std::shared_ptr<DeviceLink> link, pubsub::Broker* broker)
    : config_(std::move(config)),
      link_(std::move(link)),
      broker_(broker),
      softstate_(config_.softstate_defaults),
      graph_(proxy_graph_schema(GraphBindings{}))
{
}

snn::SnnConfig NspProxy::apply_objectives(const decl::ObjectiveDoc& doc)
{
    auto compiled = decl::compile(doc);
    std::lock_guard lock(mutex_);
    if (link_ == nullptr) {
        throw DeviceError("proxy has no device link");
    }
    link_->push_config(compiled.config);  // throws -> previous state stays active
    current_config_ = compiled.config;
    mapping_ = compiled.mapping;
    rules_.clear();
    for (const MappingRule& rule : mapping_.rules) {
        if (!rules_.emplace(rule.readout_address, RuleState{rule, {}}).second) {
            throw CompileError("duplicate readout address " +
                               std::to_string(rule.readout_address) + " in mapping");
        }
    }
    return current_config_;
}

void NspProxy::record_event(const SpikeEvent& event, const RuleState& state,
                            const std::string& event_id, std::uint64_t count)
{
    const GraphBindings& b = mapping_.bindings;
    graph::Vertex event_vertex;
    event_vertex.id = event_id;
    event_vertex.label = b.event_label;
    event_vertex.props = {
        {"topic", state.rule.topic},
        {"readout", static_cast<std::int64_t>(event.address)},
        {"count", static_cast<std::int64_t>(count)},
        {"time", static_cast<std::int64_t>(event.timestamp)},
        {"instance", config_.instance_id},
    };
    graph_.upsert_vertex(std::move(event_vertex));

    const std::string readout_id = "readout/" + std::to_string(event.address);
    graph::Vertex readout_vertex;
    readout_vertex.id = readout_id;
    readout_vertex.label = b.readout_label;
    readout_vertex.props = {{"address", static_cast<std::int64_t>(event.address)}};
    graph_.upsert_vertex(std::move(readout_vertex));
    soft_backed_[readout_id] = readout_id;

    graph::Edge source_edge;
    source_edge.id = event_id + "/source";
    source_edge.src = event_id;
    source_edge.dst = readout_id;
    source_edge.label = b.source_edge;
    graph_.upsert_edge(std::move(source_edge));

    if (state.rule.snapshot) {
        try {
            const snn::TransientState transient = link_->request_transient();
            graph::Vertex snapshot_vertex;
            snapshot_vertex.id = "snapshot/" + std::to_string(notification_seq_);
            snapshot_vertex.label = b.snapshot_label;
            snapshot_vertex.props = {
                {"time", static_cast<std::int64_t>(event.timestamp)},
                {"state", snn::to_json_string(transient)},
            };
            const std::string snapshot_id = graph_.upsert_vertex(std::move(snapshot_vertex));
            graph::Edge snapshot_edge;
            snapshot_edge.id = event_id + "/snapshot";
            snapshot_edge.src = event_id;
            snapshot_edge.dst = snapshot_id;
            snapshot_edge.label = b.snapshot_edge;
            graph_.upsert_edge(std::move(snapshot_edge));
        } catch (const Error& e) {
            ++snapshot_failures_;
            log_info("snapshot request failed: " + std::string(e.what()));
        }
    }
}

std::vector<pubsub::Notification> NspProxy::on_output_spike(const SpikeEvent& event)
{
    std::lock_guard lock(mutex_);
    std::vector<pubsub::Notification> emitted;
    const auto it = rules_.find(event.address);
    if (it == rules_.end()) {
        ++unmapped_spikes_;
        return emitted;
    }
    RuleState& state = it->second;
    state.window.push_back(event.timestamp);
    // Window is (T - H, T]: evict anything at or before T - H.
    while (!state.window.empty() &&
           event.timestamp >= state.rule.horizon &&
           state.window.front() <= event.timestamp - state.rule.horizon) {
        state.window.pop_front();
    }
    if (state.window.size() < state.rule.min_count) {
        return emitted;
    }
    const std::uint64_t count = state.window.size();
    state.window.clear();
    ++notification_seq_;
    const std::string event_id = "event/" + std::to_string(notification_seq_);

    softstate_.refresh("readout/" + std::to_string(event.address),
                       std::to_string(event.timestamp), event.timestamp);
    record_event(event, state, event_id, count);

    pubsub::Notification n;
    n.topic = state.rule.topic;
    n.attributes = {
        {"instance", config_.instance_id},
        {"readout", static_cast<std::int64_t>(event.address)},
        {"count", static_cast<std::int64_t>(count)},
        {"window_ms", ms_from_ns(state.rule.horizon)},
    };
    n.payload_ref = event_id;
    n.publisher = config_.instance_id;
    n.publish_seq = notification_seq_;
    n.publish_time = event.timestamp;
    if (broker_ != nullptr) {
        broker_->publish(n);
    }
    emitted.push_back(std::move(n));
    return emitted;
}

snn::SnnConfig NspProxy::get_system_state() const
{
    std::lock_guard lock(mutex_);
    return current_config_;
}

graph::ResultTree NspProxy::serve_query(const graph::GraphQuery& query, TimeNs now) const
{
    graph::PropertyGraph snapshot = graph_snapshot();
    std::map<std::string, std::string> soft_backed;
    {
        std::lock_guard lock(mutex_);
        soft_backed = soft_backed_;
    }
    graph::ResultTree tree = graph::run_query(snapshot, query);

    // Filter soft-state-backed vertices that have expired, subtree and all.
    auto expired = [&](const graph::ResultNode& node) {
        const auto it = soft_backed.find(node.vertex_id);
        return it != soft_backed.end() && !softstate_.get(it->second, now).has_value();
    };
    std::function<void(std::vector<std::pair<std::string, graph::ResultNode>>&)> prune_children =
        [&](std::vector<std::pair<std::string, graph::ResultNode>>& children) {
            std::erase_if(children, [&](const auto& entry) { return expired(entry.second); });
            for (auto& [label, child] : children) {
                prune_children(child.children);
            }
        };
    std::erase_if(tree.roots, expired);
    for (graph::ResultNode& root : tree.roots) {
        prune_children(root.children);
    }
    return tree;
}

std::size_t NspProxy::offload_snapshots(std::ostream& sink, TimeNs now)
{
    std::lock_guard lock(mutex_);
    const GraphBindings& b = mapping_.bindings;
    std::vector<std::string> old_snapshots;
    for (const auto& [id, vertex] : graph_.vertices()) {
        if (vertex.label != b.snapshot_label) {
            continue;
        }
        const auto time_it = vertex.props.find("time");
        if (time_it == vertex.props.end()) {
            continue;
        }
        const auto taken = static_cast<TimeNs>(std::get<std::int64_t>(time_it->second));
        if (now >= taken && now - taken > config_.snapshot_max_age) {
            old_snapshots.push_back(id);
        }
    }
    if (old_snapshots.empty()) {
        return 0;
    }
    ordered_json doc;
    doc["snapshots"] = ordered_json::array();
    for (const std::string& id : old_snapshots) {
        const graph::Vertex& v = *graph_.find_vertex(id);
        ordered_json entry;
        entry["vertex"]["id"] = v.id;
        entry["vertex"]["label"] = v.label;
        entry["vertex"]["props"] = ordered_json::object();
        for (const auto& [name, value] : v.props) {
            entry["vertex"]["props"][name] = value_to_json(value);
        }
        entry["edges"] = ordered_json::array();
        for (const std::string& edge_id : graph_.incident_edges(id, graph::Direction::kBoth)) {
            const graph::Edge& e = *graph_.find_edge(edge_id);
            ordered_json je;
            je["id"] = e.id;
            je["src"] = e.src;
            je["dst"] = e.dst;
            je["label"] = e.label;
            entry["edges"].push_back(std::move(je));
        }
        doc["snapshots"].push_back(std::move(entry));
    }
    sink << doc.dump() << '\n';
    sink.flush();
    if (!sink.good()) {
        throw IoError("offload sink write failed; graph left unpruned");
    }
    for (const std::string& id : old_snapshots) {
        graph_.remove_vertex(id, /*cascade=*/true);
    }
    return old_snapshots.size();
}

std::vector<std::string> NspProxy::sweep(TimeNs now)
{
    return softstate_.sweep(now);
}

graph::PropertyGraph NspProxy::graph_snapshot() const
{
    std::lock_guard lock(mutex_);
    return graph_;
}

std::size_t ingest_offloaded(graph::PropertyGraph& graph, const std::string& document)
{
    const auto doc = nlohmann::json::parse(document);
    std::size_t count = 0;
    for (const auto& entry : doc.at("snapshots")) {
        graph::Vertex v;
        v.id = entry.at("vertex").at("id").get<std::string>();
        v.label = entry.at("vertex").at("label").get<std::string>();
        for (const auto& [name, value] : entry.at("vertex").at("props").items()) {
            v.props[name] = value_from_json(value);
        }
        graph.upsert_vertex(std::move(v));
        for (const auto& je : entry.at("edges")) {
            // Only edges whose both endpoints exist can be restored here.
            graph::Edge e;
            e.id = je.at("id").get<std::string>();
            e.src = je.at("src").get<std::string>();
            e.dst = je.at("dst").get<std::string>();
            e.label = je.at("label").get<std::string>();
            if (graph.find_vertex(e.src) != nullptr && graph.find_vertex(e.dst) != nullptr) {
                graph.upsert_edge(std::move(e));
            }
        }
        ++count;
    }
    return count;
}

}  // namespace neuroproxy::nsp
