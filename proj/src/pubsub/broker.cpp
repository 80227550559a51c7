#include "neuroproxy/pubsub/broker.hpp"

#include <algorithm>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::pubsub {

namespace {

std::vector<std::string> split_segments(std::string_view text)
{
    std::vector<std::string> segments;
    std::size_t start = 0;
    while (true) {
        const std::size_t slash = text.find('/', start);
        if (slash == std::string_view::npos) {
            segments.emplace_back(text.substr(start));
            break;
        }
        segments.emplace_back(text.substr(start, slash - start));
        start = slash + 1;
    }
    return segments;
}

const char* op_text(CompareOp op)
{
    switch (op) {
        case CompareOp::kEq: return "=";
        case CompareOp::kNe: return "!=";
        case CompareOp::kLt: return "<";
        case CompareOp::kLe: return "<=";
        case CompareOp::kGt: return ">";
        case CompareOp::kGe: return ">=";
    }
    return "?";
}

/// Three-way comparison of attribute values. nullopt = incomparable
/// (mismatched types); equality across int/real compares numerically.
std::optional<int> compare_values(const Value& a, const Value& b)
{
    const bool a_num = a.index() <= 1;
    const bool b_num = b.index() <= 1;
    if (a_num && b_num) {
        const double x = a.index() == 0 ? static_cast<double>(std::get<std::int64_t>(a))
                                        : std::get<double>(a);
        const double y = b.index() == 0 ? static_cast<double>(std::get<std::int64_t>(b))
                                        : std::get<double>(b);
        if (x < y) return -1;
        if (x > y) return 1;
        return 0;
    }
    if (a.index() != b.index()) {
        return std::nullopt;
    }
    if (std::holds_alternative<std::string>(a)) {
        const auto& x = std::get<std::string>(a);
        const auto& y = std::get<std::string>(b);
        return x < y ? -1 : x > y ? 1 : 0;
    }
    const bool x = std::get<bool>(a);
    const bool y = std::get<bool>(b);
    return x == y ? 0 : (!x ? -1 : 1);
}

}  // namespace

TopicPattern TopicPattern::parse(std::string_view pattern)
{
    TopicPattern p;
    p.text_ = std::string(pattern);
    auto segments = split_segments(pattern);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string& s = segments[i];
        if (s.empty()) {
            throw PatternError("empty segment in pattern: " + p.text_);
        }
        if (s == "#") {
            if (i + 1 != segments.size()) {
                throw PatternError("'#' must be the terminal segment: " + p.text_);
            }
            p.trailing_hash_ = true;
            break;
        }
        if (s.find('#') != std::string::npos) {
            throw PatternError("'#' cannot be part of a segment: " + p.text_);
        }
        if (s != "+" && s.find('+') != std::string::npos) {
            throw PatternError("'+' must stand alone in its segment: " + p.text_);
        }
        p.segments_.push_back(s);
    }
    return p;
}

bool TopicPattern::matches(std::string_view topic) const
{
    const auto parts = split_segments(topic);
    if (parts.size() < segments_.size()) {
        return false;
    }
    if (parts.size() > segments_.size() && !trailing_hash_) {
        return false;
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i] == "+") {
            continue;
        }
        if (segments_[i] != parts[i]) {
            return false;
        }
    }
    return true;
}

bool Predicate::holds(const ValueMap& attributes) const
{
    for (const Comparison& c : terms) {
        const auto it = attributes.find(c.attribute);
        if (it == attributes.end()) {
            return false;
        }
        const auto cmp = compare_values(it->second, c.constant);
        if (!cmp.has_value()) {
            return false;
        }
        bool ok = false;
        switch (c.op) {
            case CompareOp::kEq: ok = *cmp == 0; break;
            case CompareOp::kNe: ok = *cmp != 0; break;
            case CompareOp::kLt: ok = *cmp < 0; break;
            case CompareOp::kLe: ok = *cmp <= 0; break;
            case CompareOp::kGt: ok = *cmp > 0; break;
            case CompareOp::kGe: ok = *cmp >= 0; break;
        }
        if (!ok) {
            return false;
        }
    }
    return true;
}

Predicate Predicate::parse(std::string_view text)
{
    Predicate p;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = std::string_view::npos;
        bool quoted = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            if (text[i] == '"' && (i == 0 || text[i - 1] != '\\')) {
                quoted = !quoted;
            } else if (text[i] == ',' && !quoted) {
                comma = i;
                break;
            }
        }
        const std::string_view term =
            comma == std::string_view::npos ? text.substr(start) : text.substr(start, comma - start);
        if (term.empty()) {
            throw PatternError("empty predicate term");
        }
        Comparison c;
        std::size_t op_at = std::string_view::npos;
        std::size_t op_len = 0;
        for (std::size_t i = 0; i < term.size(); ++i) {
            const char ch = term[i];
            if (ch == '!' || ch == '<' || ch == '>' || ch == '=') {
                op_at = i;
                op_len = (i + 1 < term.size() && term[i + 1] == '=') ? 2 : 1;
                break;
            }
        }
        if (op_at == std::string_view::npos || op_at == 0) {
            throw PatternError("predicate term missing attribute or operator: " +
                               std::string(term));
        }
        const std::string_view op = term.substr(op_at, op_len);
        if (op == "=" || op == "==") c.op = CompareOp::kEq;
        else if (op == "!=") c.op = CompareOp::kNe;
        else if (op == "<") c.op = CompareOp::kLt;
        else if (op == "<=") c.op = CompareOp::kLe;
        else if (op == ">") c.op = CompareOp::kGt;
        else if (op == ">=") c.op = CompareOp::kGe;
        else throw PatternError("unknown operator in predicate: " + std::string(term));
        c.attribute = std::string(term.substr(0, op_at));
        const std::string_view value = term.substr(op_at + op_len);
        if (value.empty()) {
            throw PatternError("predicate term missing constant: " + std::string(term));
        }
        c.constant = parse_value(value);
        p.terms.push_back(std::move(c));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (p.terms.empty()) {
        throw PatternError("empty predicate");
    }
    return p;
}

std::string Predicate::str() const
{
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += terms[i].attribute;
        out += op_text(terms[i].op);
        out += format_value(terms[i].constant);
    }
    return out;
}

void validate_topic(std::string_view topic)
{
    const auto segments = split_segments(topic);
    for (const std::string& s : segments) {
        if (s.empty()) {
            throw PatternError("empty topic segment: " + std::string(topic));
        }
        if (s.find('+') != std::string::npos || s.find('#') != std::string::npos) {
            throw PatternError("wildcards are not allowed in published topics: " +
                               std::string(topic));
        }
    }
}

bool match(const Subscription& sub, const Notification& n)
{
    if (!sub.pattern.matches(n.topic)) {
        return false;
    }
    if (sub.predicate.has_value() && !sub.predicate->holds(n.attributes)) {
        return false;
    }
    return true;
}

Broker::Broker(std::size_t default_queue_capacity) : default_capacity_(default_queue_capacity) {}

std::uint64_t Broker::subscribe(TopicPattern pattern, std::optional<Predicate> predicate,
                                std::size_t queue_capacity)
{
    std::lock_guard lock(mutex_);
    const std::uint64_t id = next_id_++;
    Sub sub;
    sub.subscription = Subscription{id, std::move(pattern), std::move(predicate)};
    sub.capacity = queue_capacity == 0 ? default_capacity_ : queue_capacity;
    subs_.emplace(id, std::move(sub));
    return id;
}

bool Broker::unsubscribe(std::uint64_t id)
{
    std::lock_guard lock(mutex_);
    return subs_.erase(id) > 0;
}

std::size_t Broker::publish(const Notification& n)
{
    validate_topic(n.topic);
    std::lock_guard lock(mutex_);
    if (!n.publisher.empty()) {
        auto [it, inserted] = last_seq_.try_emplace(n.publisher, n.publish_seq);
        if (!inserted) {
            if (n.publish_seq <= it->second) {
                throw PatternError("publish_seq must be strictly increasing per publisher");
            }
            it->second = n.publish_seq;
        }
    }
    std::size_t delivered = 0;
    for (auto& [id, sub] : subs_) {
        if (!match(sub.subscription, n)) {
            continue;
        }
        if (sub.queue.size() >= sub.capacity) {
            sub.queue.pop_front();  // drop-oldest, freshness over completeness
            ++sub.dropped;
        }
        sub.queue.push_back(n);
        ++delivered;
    }
    return delivered;
}

std::vector<Notification> Broker::poll(std::uint64_t id, std::size_t max)
{
    std::lock_guard lock(mutex_);
    std::vector<Notification> out;
    auto it = subs_.find(id);
    if (it == subs_.end()) {
        return out;
    }
    while (!it->second.queue.empty() && out.size() < max) {
        out.push_back(std::move(it->second.queue.front()));
        it->second.queue.pop_front();
    }
    return out;
}

std::uint64_t Broker::dropped_count(std::uint64_t id) const
{
    std::lock_guard lock(mutex_);
    auto it = subs_.find(id);
    return it == subs_.end() ? 0 : it->second.dropped;
}

std::size_t Broker::subscription_count() const
{
    std::lock_guard lock(mutex_);
    return subs_.size();
}

}  // namespace neuroproxy::pubsub
