#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neuroproxy/values.hpp"

namespace neuroproxy::graph {

/// Declares, per vertex/edge label, the allowed property names and their
/// scalar types. Enforced on every upsert.
struct GraphSchema {
    struct LabelSchema {
        std::map<std::string, ValueType> properties;
    };
    std::map<std::string, LabelSchema> vertex_labels;
    std::map<std::string, LabelSchema> edge_labels;
};

struct Vertex {
    std::string id;
    std::string label;
    ValueMap props;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
    std::string id;
    std::string src;
    std::string dst;
    std::string label;
    std::optional<double> weight;  // >= 0 when present
    ValueMap props;

    friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Direction { kOut, kIn, kBoth };

/// Labeled directed multigraph with typed properties. Single writer;
/// copies serve as immutable snapshots for concurrent readers.
class PropertyGraph {
public:
    explicit PropertyGraph(GraphSchema schema = {});

    const GraphSchema& schema() const { return schema_; }

    /// Idempotent by id: re-upserting replaces label and properties.
    /// Throws GraphError on schema violations or dangling edge endpoints.
    std::string upsert_vertex(Vertex v);
    std::string upsert_edge(Edge e);

    /// Removing a vertex with incident edges requires cascade=true.
    bool remove_vertex(const std::string& id, bool cascade = false);
    bool remove_edge(const std::string& id);

    const Vertex* find_vertex(const std::string& id) const;
    const Edge* find_edge(const std::string& id) const;

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::map<std::string, Vertex>& vertices() const { return vertices_; }
    const std::map<std::string, Edge>& edges() const { return edges_; }

    /// Edge ids incident to a vertex, ascending; kOut lists edges whose
    /// src is the vertex, kIn edges whose dst is.
    std::vector<std::string> incident_edges(const std::string& vertex_id, Direction dir) const;

    /// Breadth-first reachability with a visited-set cycle guard. Follows
    /// edges with the given label (nullopt = any) in the given direction,
    /// up to max_depth hops. Includes the start vertex. Throws GraphError
    /// on an unknown start.
    std::set<std::string> traverse(const std::string& start,
                                   const std::optional<std::string>& edge_label, Direction dir,
                                   std::uint32_t max_depth) const;

    struct PathResult {
        std::vector<std::string> path;
        double cost = 0.0;
    };

    /// Dijkstra over non-negative edge weights (absent weight counts as
    /// 1). Ties resolve to the lexicographically smallest vertex-id
    /// sequence. Returns nullopt when no path exists; throws GraphError on
    /// a negative weight.
    std::optional<PathResult> shortest_path(const std::string& src, const std::string& dst) const;

private:
    void check_props(const GraphSchema::LabelSchema& label_schema, const std::string& label,
                     const ValueMap& props, const char* entity) const;

    GraphSchema schema_;
    std::map<std::string, Vertex> vertices_;
    std::map<std::string, Edge> edges_;
    std::map<std::string, std::set<std::string>> out_edges_;  // vertex id -> edge ids
    std::map<std::string, std::set<std::string>> in_edges_;
};

}  // namespace neuroproxy::graph
