#include "neuroproxy/graph/query.hpp"

#include <algorithm>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::graph {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer

enum class TokenKind { kIdent, kValue, kLBrace, kRBrace, kComma, kEquals, kArrowOut, kArrowIn, kEnd };

struct Token {
    TokenKind kind;
    std::string text;
    Value value;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take()
    {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const
    {
        throw ParseError(message, current_.line, current_.column);
    }

private:
    static bool ident_char(char c)
    {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '.' || c == '/';
    }

    void advance()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                       text_[pos_] == '\n' || text_[pos_] == '\r')) {
            bump();
        }
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_.kind = TokenKind::kEnd;
            current_.text.clear();
            return;
        }
        const char c = text_[pos_];
        if (c == '{') { one(TokenKind::kLBrace); return; }
        if (c == '}') { one(TokenKind::kRBrace); return; }
        if (c == ',') { one(TokenKind::kComma); return; }
        if (c == '=') { one(TokenKind::kEquals); return; }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            current_.kind = TokenKind::kArrowOut;
            current_.text = "->";
            bump();
            bump();
            return;
        }
        if (c == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            current_.kind = TokenKind::kArrowIn;
            current_.text = "<-";
            bump();
            bump();
            return;
        }
        if (c == '"') {
            std::string raw;
            raw += c;
            bump();
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    raw += text_[pos_];
                    bump();
                }
                raw += text_[pos_];
                bump();
            }
            if (pos_ >= text_.size()) {
                throw ParseError("unterminated string", current_.line, current_.column);
            }
            raw += '"';
            bump();
            current_.kind = TokenKind::kValue;
            current_.text = raw;
            current_.value = parse_value(raw);
            return;
        }
        if (ident_char(c) || c == '-' || c == '+') {
            std::string word;
            while (pos_ < text_.size() && (ident_char(text_[pos_]) ||
                                           ((text_[pos_] == '-' || text_[pos_] == '+') &&
                                            word.empty()))) {
                // '-' only leads numeric literals; '->' was handled above.
                word += text_[pos_];
                bump();
            }
            current_.text = word;
            const bool numeric = !word.empty() && (word[0] == '-' || word[0] == '+' ||
                                                   (word[0] >= '0' && word[0] <= '9'));
            if (numeric || word == "true" || word == "false") {
                current_.kind = TokenKind::kValue;
                current_.value = parse_value(word);
            } else {
                current_.kind = TokenKind::kIdent;
            }
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }

    void one(TokenKind kind)
    {
        current_.kind = kind;
        current_.text = text_[pos_];
        bump();
    }

    void bump()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    Token current_{};
};

// ---------------------------------------------------------------------------
// Recursive-descent parser

class QueryParser {
public:
    explicit QueryParser(std::string_view text) : lexer_(text) {}

    GraphQuery parse()
    {
        expect_keyword("match");
        GraphQuery q;
        q.root = parse_selector();
        parse_body(q.fields, q.expansions);
        if (lexer_.peek().kind != TokenKind::kEnd) {
            lexer_.fail("trailing input after query");
        }
        if (q.fields.empty()) {
            lexer_.fail("requested field list must be non-empty");
        }
        return q;
    }

private:
    void expect_keyword(const std::string& word)
    {
        if (lexer_.peek().kind != TokenKind::kIdent || lexer_.peek().text != word) {
            lexer_.fail("expected '" + word + "'");
        }
        lexer_.take();
    }

    Token expect(TokenKind kind, const char* what)
    {
        if (lexer_.peek().kind != kind) {
            lexer_.fail(std::string("expected ") + what);
        }
        return lexer_.take();
    }

    Selector parse_selector()
    {
        Selector s;
        s.label = expect(TokenKind::kIdent, "label").text;
        if (lexer_.peek().kind == TokenKind::kLBrace) {
            lexer_.take();
            while (lexer_.peek().kind != TokenKind::kRBrace) {
                const std::string name = expect(TokenKind::kIdent, "property name").text;
                expect(TokenKind::kEquals, "'='");
                const Token value = lexer_.take();
                if (value.kind != TokenKind::kValue && value.kind != TokenKind::kIdent) {
                    lexer_.fail("expected property value");
                }
                // Bare identifiers on the value side are string constants.
                s.equalities.emplace_back(
                    name, value.kind == TokenKind::kValue ? value.value : Value(value.text));
                if (lexer_.peek().kind == TokenKind::kComma) {
                    lexer_.take();
                }
            }
            lexer_.take();  // '}'
        }
        return s;
    }

    void parse_body(std::vector<std::string>& fields, std::vector<Expansion>& expansions)
    {
        expect(TokenKind::kLBrace, "'{'");
        while (lexer_.peek().kind != TokenKind::kRBrace) {
            const Token head = expect(TokenKind::kIdent, "field or expansion");
            if (lexer_.peek().kind == TokenKind::kArrowOut ||
                lexer_.peek().kind == TokenKind::kArrowIn) {
                Expansion e;
                e.edge_label = head.text;
                e.direction = lexer_.take().kind == TokenKind::kArrowOut ? Direction::kOut
                                                                         : Direction::kIn;
                e.child = parse_selector();
                expect_keyword("depth");
                const Token depth = expect(TokenKind::kValue, "depth limit");
                if (!std::holds_alternative<std::int64_t>(depth.value) ||
                    std::get<std::int64_t>(depth.value) < 1) {
                    lexer_.fail("depth limit must be a positive integer");
                }
                e.max_depth = static_cast<std::uint32_t>(std::get<std::int64_t>(depth.value));
                parse_body(e.fields, e.expansions);
                if (e.fields.empty()) {
                    lexer_.fail("requested field list must be non-empty");
                }
                expansions.push_back(std::move(e));
            } else {
                fields.push_back(head.text);
            }
            if (lexer_.peek().kind == TokenKind::kComma) {
                lexer_.take();
            }
        }
        lexer_.take();  // '}'
    }

    Lexer lexer_;
};

// ---------------------------------------------------------------------------
// Execution

std::optional<Value> resolve_field(const PropertyGraph& graph, const Vertex& v,
                                   const std::string& field)
{
    if (field == "id") {
        return Value(v.id);
    }
    if (field == "label") {
        return Value(v.label);
    }
    const auto& label_schema = graph.schema().vertex_labels.at(v.label);
    if (!label_schema.properties.contains(field)) {
        throw GraphError("unknown requested field '" + field + "' for label '" + v.label + "'");
    }
    const auto it = v.props.find(field);
    if (it == v.props.end()) {
        return std::nullopt;  // declared but unset
    }
    return it->second;
}

struct Frame {
    const std::vector<std::string>* fields;
    const std::vector<Expansion>* expansions;
};

ResultNode render_node(const PropertyGraph& graph, const Vertex& v, const Frame& frame,
                       std::uint32_t remaining_for_clause, const Expansion* repeating_clause,
                       std::vector<std::string>& path);

/// Expands one clause from `v`, appending (edge label, child) pairs.
void expand_clause(const PropertyGraph& graph, const Vertex& v, const Expansion& clause,
                   std::uint32_t remaining, std::vector<std::string>& path,
                   std::vector<std::pair<std::string, ResultNode>>& out)
{
    for (const std::string& edge_id : graph.incident_edges(v.id, clause.direction)) {
        const Edge& e = *graph.find_edge(edge_id);
        if (e.label != clause.edge_label) {
            continue;
        }
        std::string next_id;
        if (clause.direction == Direction::kOut && e.src == v.id) {
            next_id = e.dst;
        } else if (clause.direction == Direction::kIn && e.dst == v.id) {
            next_id = e.src;
        } else {
            continue;
        }
        if (std::find(path.begin(), path.end(), next_id) != path.end()) {
            continue;  // per-path cycle guard
        }
        const Vertex& child = *graph.find_vertex(next_id);
        if (!clause.child.matches(child)) {
            continue;
        }
        Frame child_frame{&clause.fields, &clause.expansions};
        out.emplace_back(clause.edge_label,
                         render_node(graph, child, child_frame, remaining - 1, &clause, path));
    }
}

ResultNode render_node(const PropertyGraph& graph, const Vertex& v, const Frame& frame,
                       std::uint32_t remaining_for_clause, const Expansion* repeating_clause,
                       std::vector<std::string>& path)
{
    ResultNode node;
    node.vertex_id = v.id;
    node.fields.reserve(frame.fields->size());
    for (const std::string& f : *frame.fields) {
        node.fields.emplace_back(f, resolve_field(graph, v, f));
    }
    path.push_back(v.id);
    if (repeating_clause != nullptr && remaining_for_clause > 0) {
        expand_clause(graph, v, *repeating_clause, remaining_for_clause, path, node.children);
    }
    for (const Expansion& clause : *frame.expansions) {
        expand_clause(graph, v, clause, clause.max_depth, path, node.children);
    }
    path.pop_back();
    node.has_child_clause = !frame.expansions->empty() ||
                            (repeating_clause != nullptr && remaining_for_clause > 0);
    std::stable_sort(node.children.begin(), node.children.end(),
                     [](const auto& a, const auto& b) {
                         if (a.first != b.first) return a.first < b.first;
                         return a.second.vertex_id < b.second.vertex_id;
                     });
    return node;
}

}  // namespace

bool Selector::matches(const Vertex& v) const
{
    if (!label.empty() && v.label != label) {
        return false;
    }
    for (const auto& [name, expected] : equalities) {
        Value actual;
        if (name == "id") {
            actual = v.id;
        } else if (name == "label") {
            actual = v.label;
        } else {
            const auto it = v.props.find(name);
            if (it == v.props.end()) {
                return false;
            }
            actual = it->second;
        }
        if (actual.index() <= 1 && expected.index() <= 1) {
            const double x = actual.index() == 0
                                 ? static_cast<double>(std::get<std::int64_t>(actual))
                                 : std::get<double>(actual);
            const double y = expected.index() == 0
                                 ? static_cast<double>(std::get<std::int64_t>(expected))
                                 : std::get<double>(expected);
            if (x != y) {
                return false;
            }
        } else if (actual != expected) {
            return false;
        }
    }
    return true;
}

GraphQuery GraphQuery::parse(std::string_view text)
{
    return QueryParser(text).parse();
}

ResultTree run_query(const PropertyGraph& graph, const GraphQuery& query)
{
    ResultTree tree;
    Frame root_frame{&query.fields, &query.expansions};
    for (const auto& [id, vertex] : graph.vertices()) {
        if (!query.root.matches(vertex)) {
            continue;
        }
        std::vector<std::string> path;
        tree.roots.push_back(render_node(graph, vertex, root_frame, 0, nullptr, path));
    }
    return tree;
}

namespace {

nlohmann::ordered_json node_to_json(const ResultNode& node)
{
    nlohmann::ordered_json j;
    j["fields"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : node.fields) {
        j["fields"][name] = value.has_value() ? value_to_json(*value) : nlohmann::ordered_json();
    }
    if (node.has_child_clause) {
        j["children"] = nlohmann::ordered_json::array();
        for (const auto& [edge_label, child] : node.children) {
            nlohmann::ordered_json entry;
            entry["edge"] = edge_label;
            entry["node"] = node_to_json(child);
            j["children"].push_back(std::move(entry));
        }
    }
    return j;
}

}  // namespace

nlohmann::ordered_json result_to_json(const ResultTree& tree)
{
    nlohmann::ordered_json roots = nlohmann::ordered_json::array();
    for (const ResultNode& node : tree.roots) {
        roots.push_back(node_to_json(node));
    }
    return roots;
}

}  // namespace neuroproxy::graph
