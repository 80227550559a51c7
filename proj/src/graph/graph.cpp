#include "neuroproxy/graph/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::graph {

PropertyGraph::PropertyGraph(GraphSchema schema) : schema_(std::move(schema)) {}

void PropertyGraph::check_props(const GraphSchema::LabelSchema& label_schema,
                                const std::string& label, const ValueMap& props,
                                const char* entity) const
{
    for (const auto& [name, value] : props) {
        const auto it = label_schema.properties.find(name);
        if (it == label_schema.properties.end()) {
            throw GraphError(std::string(entity) + " label '" + label +
                             "' does not declare property '" + name + "'");
        }
        if (type_of(value) != it->second) {
            throw GraphError(std::string(entity) + " property '" + name + "' must be " +
                             value_type_name(it->second));
        }
    }
}

std::string PropertyGraph::upsert_vertex(Vertex v)
{
    if (v.id.empty()) {
        throw GraphError("vertex id must be non-empty");
    }
    const auto label_it = schema_.vertex_labels.find(v.label);
    if (label_it == schema_.vertex_labels.end()) {
        throw GraphError("unknown vertex label '" + v.label + "'");
    }
    check_props(label_it->second, v.label, v.props, "vertex");
    const std::string id = v.id;
    vertices_[id] = std::move(v);
    return id;
}

std::string PropertyGraph::upsert_edge(Edge e)
{
    if (e.id.empty()) {
        throw GraphError("edge id must be non-empty");
    }
    const auto label_it = schema_.edge_labels.find(e.label);
    if (label_it == schema_.edge_labels.end()) {
        throw GraphError("unknown edge label '" + e.label + "'");
    }
    check_props(label_it->second, e.label, e.props, "edge");
    if (!vertices_.contains(e.src)) {
        throw GraphError("edge '" + e.id + "' has dangling source '" + e.src + "'");
    }
    if (!vertices_.contains(e.dst)) {
        throw GraphError("edge '" + e.id + "' has dangling destination '" + e.dst + "'");
    }
    if (e.weight.has_value() && *e.weight < 0.0) {
        throw GraphError("edge '" + e.id + "' has negative weight");
    }
    // Re-upserting may move the edge between endpoints; drop old indexing.
    if (const auto old = edges_.find(e.id); old != edges_.end()) {
        out_edges_[old->second.src].erase(e.id);
        in_edges_[old->second.dst].erase(e.id);
    }
    out_edges_[e.src].insert(e.id);
    in_edges_[e.dst].insert(e.id);
    const std::string id = e.id;
    edges_[id] = std::move(e);
    return id;
}

bool PropertyGraph::remove_vertex(const std::string& id, bool cascade)
{
    const auto it = vertices_.find(id);
    if (it == vertices_.end()) {
        return false;
    }
    std::set<std::string> incident;
    if (const auto out = out_edges_.find(id); out != out_edges_.end()) {
        incident.insert(out->second.begin(), out->second.end());
    }
    if (const auto in = in_edges_.find(id); in != in_edges_.end()) {
        incident.insert(in->second.begin(), in->second.end());
    }
    if (!incident.empty() && !cascade) {
        throw GraphError("vertex '" + id + "' has incident edges; removal requires cascade");
    }
    for (const std::string& edge_id : incident) {
        remove_edge(edge_id);
    }
    vertices_.erase(it);
    out_edges_.erase(id);
    in_edges_.erase(id);
    return true;
}

bool PropertyGraph::remove_edge(const std::string& id)
{
    const auto it = edges_.find(id);
    if (it == edges_.end()) {
        return false;
    }
    out_edges_[it->second.src].erase(id);
    in_edges_[it->second.dst].erase(id);
    edges_.erase(it);
    return true;
}

const Vertex* PropertyGraph::find_vertex(const std::string& id) const
{
    const auto it = vertices_.find(id);
    return it == vertices_.end() ? nullptr : &it->second;
}

const Edge* PropertyGraph::find_edge(const std::string& id) const
{
    const auto it = edges_.find(id);
    return it == edges_.end() ? nullptr : &it->second;
}

std::vector<std::string> PropertyGraph::incident_edges(const std::string& vertex_id,
                                                       Direction dir) const
{
    std::vector<std::string> out;
    if (dir == Direction::kOut || dir == Direction::kBoth) {
        if (const auto it = out_edges_.find(vertex_id); it != out_edges_.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    if (dir == Direction::kIn || dir == Direction::kBoth) {
        if (const auto it = in_edges_.find(vertex_id); it != in_edges_.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::set<std::string> PropertyGraph::traverse(const std::string& start,
                                              const std::optional<std::string>& edge_label,
                                              Direction dir, std::uint32_t max_depth) const
{
    if (!vertices_.contains(start)) {
        throw GraphError("unknown start vertex '" + start + "'");
    }
    std::set<std::string> visited{start};
    std::deque<std::pair<std::string, std::uint32_t>> frontier{{start, 0}};
    while (!frontier.empty()) {
        const auto [current, depth] = frontier.front();
        frontier.pop_front();
        if (depth >= max_depth) {
            continue;
        }
        for (const std::string& edge_id : incident_edges(current, dir)) {
            const Edge& e = edges_.at(edge_id);
            if (edge_label.has_value() && e.label != *edge_label) {
                continue;
            }
            std::string next;
            if (e.src == current && (dir == Direction::kOut || dir == Direction::kBoth)) {
                next = e.dst;
            } else if (e.dst == current && (dir == Direction::kIn || dir == Direction::kBoth)) {
                next = e.src;
            } else {
                continue;
            }
            if (visited.insert(next).second) {
                frontier.emplace_back(next, depth + 1);
            }
        }
    }
    return visited;
}

std::optional<PropertyGraph::PathResult> PropertyGraph::shortest_path(const std::string& src,
                                                                      const std::string& dst) const
{
    if (!vertices_.contains(src)) {
        throw GraphError("unknown source vertex '" + src + "'");
    }
    if (!vertices_.contains(dst)) {
        throw GraphError("unknown destination vertex '" + dst + "'");
    }

    // Best-first over (cost, vertex-id path); the first finalization of a
    // vertex carries its minimal cost and, among minimal costs, the
    // lexicographically smallest path. Expanding only into non-finalized
    // vertices keeps every queued path simple.
    struct Entry {
        double cost;
        std::vector<std::string> path;
        bool operator>(const Entry& other) const
        {
            if (cost != other.cost) return cost > other.cost;
            return path > other.path;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::set<std::string> finalized;
    queue.push(Entry{0.0, {src}});
    while (!queue.empty()) {
        Entry entry = queue.top();
        queue.pop();
        const std::string& current = entry.path.back();
        if (finalized.contains(current)) {
            continue;
        }
        finalized.insert(current);
        if (current == dst) {
            return PathResult{std::move(entry.path), entry.cost};
        }
        if (const auto it = out_edges_.find(current); it != out_edges_.end()) {
            for (const std::string& edge_id : it->second) {
                const Edge& e = edges_.at(edge_id);
                const double w = e.weight.value_or(1.0);
                if (w < 0.0) {
                    throw GraphError("negative weight on edge '" + edge_id + "'");
                }
                if (finalized.contains(e.dst)) {
                    continue;
                }
                Entry next{entry.cost + w, entry.path};
                next.path.push_back(e.dst);
                queue.push(std::move(next));
            }
        }
    }
    return std::nullopt;
}

}  // namespace neuroproxy::graph
