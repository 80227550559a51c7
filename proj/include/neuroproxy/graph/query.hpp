#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "neuroproxy/graph/graph.hpp"

namespace neuroproxy::graph {

/// Tree-extracting query over a property graph.
///
/// Text form (UTF-8):
///   match <label>{<prop>=<val>,...} { <field>, <edgeLabel-><label> depth <n> { ... } }
///
/// '->' follows outgoing edges, '<-' incoming ones. Fields may be
/// schema-declared properties or the pseudo-fields `id` and `label`.
struct Selector {
    std::string label;
    std::vector<std::pair<std::string, Value>> equalities;

    bool matches(const Vertex& v) const;

    friend bool operator==(const Selector&, const Selector&) = default;
};

struct Expansion {
    std::string edge_label;
    Direction direction = Direction::kOut;
    std::uint32_t max_depth = 1;  // >= 1
    Selector child;
    std::vector<std::string> fields;
    std::vector<Expansion> expansions;

    friend bool operator==(const Expansion&, const Expansion&) = default;
};

struct GraphQuery {
    Selector root;
    std::vector<std::string> fields;
    std::vector<Expansion> expansions;

    static GraphQuery parse(std::string_view text);  // throws ParseError

    friend bool operator==(const GraphQuery&, const GraphQuery&) = default;
};

/// Result node: exactly the requested fields, in request order, plus the
/// expanded children ordered by (edge label, child id). A declared but
/// unset property renders as null.
struct ResultNode {
    std::string vertex_id;  // bookkeeping; serialized only if requested
    std::vector<std::pair<std::string, std::optional<Value>>> fields;
    std::vector<std::pair<std::string, ResultNode>> children;  // (edge label, node)
    bool has_child_clause = false;
};

struct ResultTree {
    std::vector<ResultNode> roots;
};

/// Executes a query against a snapshot. The result is a forest: the DAG
/// under each matched root unrolled up to the depth limits, with a
/// per-path cycle guard (an ancestor on the current path is never
/// re-expanded). A selector matching nothing yields an empty result; an
/// unrequestable field raises GraphError naming the field.
ResultTree run_query(const PropertyGraph& graph, const GraphQuery& query);

/// Stable JSON rendering: one object per root, requested fields under
/// "fields" in request order, children under "children" as
/// {"edge":..., "node":...} entries.
nlohmann::ordered_json result_to_json(const ResultTree& tree);

}  // namespace neuroproxy::graph
