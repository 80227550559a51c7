#include "neuroproxy/values.hpp"

#include <charconv>
#include <cstdio>

#include "neuroproxy/errors.hpp"

namespace neuroproxy {

ValueType type_of(const Value& v)
{
    switch (v.index()) {
        case 0: return ValueType::kInt;
        case 1: return ValueType::kReal;
        case 2: return ValueType::kString;
        default: return ValueType::kBool;
    }
}

const char* value_type_name(ValueType t)
{
    switch (t) {
        case ValueType::kInt: return "int";
        case ValueType::kReal: return "real";
        case ValueType::kString: return "string";
        case ValueType::kBool: return "bool";
    }
    return "?";
}

namespace {

std::string format_real(double d)
{
    // Shortest representation that round-trips, stable across runs.
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    std::string s(buf, ptr);
    // Keep reals visually distinct from ints on the wire.
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string quote_string(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_value(const Value& v)
{
    switch (v.index()) {
        case 0: return std::to_string(std::get<std::int64_t>(v));
        case 1: return format_real(std::get<double>(v));
        case 2: return quote_string(std::get<std::string>(v));
        default: return std::get<bool>(v) ? "true" : "false";
    }
}

Value parse_value(std::string_view token)
{
    if (token.empty()) {
        throw Error("empty value token");
    }
    if (token.front() == '"') {
        if (token.size() < 2 || token.back() != '"') {
            throw Error("unterminated string value: " + std::string(token));
        }
        std::string out;
        for (std::size_t i = 1; i + 1 < token.size(); ++i) {
            if (token[i] == '\\' && i + 2 < token.size()) {
                ++i;
            }
            out += token[i];
        }
        return out;
    }
    if (token == "true") {
        return true;
    }
    if (token == "false") {
        return false;
    }
    const bool real = token.find('.') != std::string_view::npos ||
                      token.find('e') != std::string_view::npos ||
                      token.find('E') != std::string_view::npos;
    if (real) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), d);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw Error("bad real value: " + std::string(token));
        }
        return d;
    }
    std::int64_t i = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), i);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error("bad value token: " + std::string(token));
    }
    return i;
}

nlohmann::ordered_json value_to_json(const Value& v)
{
    switch (v.index()) {
        case 0: return std::get<std::int64_t>(v);
        case 1: return std::get<double>(v);
        case 2: return std::get<std::string>(v);
        default: return std::get<bool>(v);
    }
}

Value value_from_json(const nlohmann::json& j)
{
    if (j.is_boolean()) {
        return j.get<bool>();
    }
    if (j.is_number_integer()) {
        return j.get<std::int64_t>();
    }
    if (j.is_number_float()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        return j.get<std::string>();
    }
    throw Error("JSON value is not a scalar");
}

}  // namespace neuroproxy
