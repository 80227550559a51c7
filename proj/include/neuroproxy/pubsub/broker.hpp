#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "neuroproxy/spike.hpp"
#include "neuroproxy/values.hpp"

namespace neuroproxy::pubsub {

/// Event notification published to the broker. Topics are '/'-separated
/// non-empty segments without wildcards; publish_seq is strictly
/// increasing per publisher.
struct Notification {
    std::string topic;
    ValueMap attributes;
    std::string payload_ref;  // optional graph-query hint; empty = none
    std::string publisher;
    std::uint64_t publish_seq = 0;
    TimeNs publish_time = 0;

    friend bool operator==(const Notification&, const Notification&) = default;
};

/// Topic filter: '+' matches exactly one segment, a terminal '#' matches
/// any (possibly empty) suffix.
class TopicPattern {
public:
    static TopicPattern parse(std::string_view pattern);  // throws PatternError

    bool matches(std::string_view topic) const;
    const std::string& str() const { return text_; }

    friend bool operator==(const TopicPattern&, const TopicPattern&) = default;

private:
    std::vector<std::string> segments_;
    bool trailing_hash_ = false;
    std::string text_;
};

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

struct Comparison {
    std::string attribute;
    CompareOp op = CompareOp::kEq;
    Value constant;

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// Conjunction of attribute comparisons. A missing attribute makes the
/// predicate false.
struct Predicate {
    std::vector<Comparison> terms;

    bool holds(const ValueMap& attributes) const;

    /// Text form: comma-joined `attr op value` with ops = != < <= > >=.
    static Predicate parse(std::string_view text);  // throws PatternError
    std::string str() const;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Subscription {
    std::uint64_t id = 0;
    TopicPattern pattern;
    std::optional<Predicate> predicate;
};

/// Hybrid matching: topic filter first, then the content predicate.
bool match(const Subscription& sub, const Notification& n);

/// Validates published-notification invariants (throws PatternError).
void validate_topic(std::string_view topic);

/// In-process hybrid topic/content broker. Delivery queues are bounded
/// per subscription with a drop-oldest overflow policy and a dropped
/// counter; publishers never block on slow subscribers.
///
/// Safe for concurrent publishers and subscribers.
class Broker {
public:
    explicit Broker(std::size_t default_queue_capacity = 1024);

    std::uint64_t subscribe(TopicPattern pattern, std::optional<Predicate> predicate = {},
                            std::size_t queue_capacity = 0);  // 0 = default
    bool unsubscribe(std::uint64_t id);

    /// Delivers to every matching subscription exactly once; returns the
    /// delivery count. Throws PatternError on invalid topics or a
    /// publish_seq regression.
    std::size_t publish(const Notification& n);

    /// Drains up to `max` queued deliveries for a subscription, oldest
    /// first.
    std::vector<Notification> poll(std::uint64_t id, std::size_t max = SIZE_MAX);

    std::uint64_t dropped_count(std::uint64_t id) const;
    std::size_t subscription_count() const;

private:
    struct Sub {
        Subscription subscription;
        std::deque<Notification> queue;
        std::size_t capacity;
        std::uint64_t dropped = 0;
    };

    std::size_t default_capacity_;
    std::map<std::uint64_t, Sub> subs_;
    std::map<std::string, std::uint64_t> last_seq_;  // per publisher
    std::uint64_t next_id_ = 1;
    mutable std::mutex mutex_;
};

}  // namespace neuroproxy::pubsub
