#pragma once

#include <optional>
#include <string>
#include <variant>

#include "neuroproxy/pubsub/broker.hpp"

namespace neuroproxy::pubsub {

/// Line-delimited UTF-8 socket protocol:
///   SUB <id> <pattern> [<predicate>]
///   PUB <topic> <attr=val,...>
///   EVT <topic> <attrs> <payload_ref>
/// Attributes are name=value comma-joined; strings double-quoted with
/// backslash escapes. One frame per line.
struct SubCommand {
    std::string client_id;
    TopicPattern pattern;
    std::optional<Predicate> predicate;
};

struct PubCommand {
    std::string topic;
    ValueMap attributes;
};

struct EvtFrame {
    std::string topic;
    ValueMap attributes;
    std::string payload_ref;
};

using Frame = std::variant<SubCommand, PubCommand, EvtFrame>;

/// Parses one protocol line (without the trailing newline). Throws
/// PatternError on malformed frames.
Frame parse_frame(std::string_view line);

std::string format_attributes(const ValueMap& attributes);
ValueMap parse_attributes(std::string_view text);

std::string format_evt(const Notification& n);
std::string format_pub(const PubCommand& cmd);
std::string format_sub(const SubCommand& cmd);

}  // namespace neuroproxy::pubsub
