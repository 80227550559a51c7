#include "neuroproxy/pubsub/wire.hpp"

#include <vector>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::pubsub {

namespace {

/// Splits on spaces that are outside double quotes.
std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i < line.size() && line[i] == '"' && (i == 0 || line[i - 1] != '\\')) {
            quoted = !quoted;
        }
        if (i == line.size() || (line[i] == ' ' && !quoted)) {
            if (i > start) {
                fields.push_back(line.substr(start, i - start));
            }
            start = i + 1;
        }
    }
    return fields;
}

/// Splits on commas outside quotes.
std::vector<std::string_view> split_commas(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && text[i] == '"' && (i == 0 || text[i - 1] != '\\')) {
            quoted = !quoted;
        }
        if (i == text.size() || (text[i] == ',' && !quoted)) {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

}  // namespace

std::string format_attributes(const ValueMap& attributes)
{
    if (attributes.empty()) {
        return "-";
    }
    std::string out;
    for (const auto& [name, value] : attributes) {
        if (!out.empty()) {
            out += ',';
        }
        out += name;
        out += '=';
        out += format_value(value);
    }
    return out;
}

ValueMap parse_attributes(std::string_view text)
{
    ValueMap attributes;
    if (text == "-" || text.empty()) {
        return attributes;
    }
    for (std::string_view part : split_commas(text)) {
        const std::size_t eq = part.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw PatternError("malformed attribute: " + std::string(part));
        }
        attributes.emplace(std::string(part.substr(0, eq)), parse_value(part.substr(eq + 1)));
    }
    return attributes;
}

Frame parse_frame(std::string_view line)
{
    const auto fields = split_fields(line);
    if (fields.empty()) {
        throw PatternError("empty frame");
    }
    const std::string_view verb = fields[0];
    if (verb == "SUB") {
        if (fields.size() < 3 || fields.size() > 4) {
            throw PatternError("SUB needs: SUB <id> <pattern> [<predicate>]");
        }
        SubCommand cmd;
        cmd.client_id = std::string(fields[1]);
        cmd.pattern = TopicPattern::parse(fields[2]);
        if (fields.size() == 4) {
            cmd.predicate = Predicate::parse(fields[3]);
        }
        return cmd;
    }
    if (verb == "PUB") {
        if (fields.size() != 3) {
            throw PatternError("PUB needs: PUB <topic> <attr=val,...>");
        }
        PubCommand cmd;
        cmd.topic = std::string(fields[1]);
        validate_topic(cmd.topic);
        cmd.attributes = parse_attributes(fields[2]);
        return cmd;
    }
    if (verb == "EVT") {
        if (fields.size() != 4) {
            throw PatternError("EVT needs: EVT <topic> <attrs> <payload_ref>");
        }
        EvtFrame evt;
        evt.topic = std::string(fields[1]);
        evt.attributes = parse_attributes(fields[2]);
        evt.payload_ref = fields[3] == "-" ? std::string() : std::string(fields[3]);
        return evt;
    }
    throw PatternError("unknown frame verb: " + std::string(verb));
}

std::string format_evt(const Notification& n)
{
    std::string out = "EVT ";
    out += n.topic;
    out += ' ';
    out += format_attributes(n.attributes);
    out += ' ';
    out += n.payload_ref.empty() ? "-" : n.payload_ref;
    return out;
}

std::string format_pub(const PubCommand& cmd)
{
    return "PUB " + cmd.topic + " " + format_attributes(cmd.attributes);
}

std::string format_sub(const SubCommand& cmd)
{
    std::string out = "SUB " + cmd.client_id + " " + cmd.pattern.str();
    if (cmd.predicate.has_value()) {
        out += ' ';
        out += cmd.predicate->str();
    }
    return out;
}

}  // namespace neuroproxy::pubsub
