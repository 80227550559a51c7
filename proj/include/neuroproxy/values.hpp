#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

namespace neuroproxy {

/// Scalar value shared by notification attributes and graph properties.
using Value = std::variant<std::int64_t, double, std::string, bool>;

using ValueMap = std::map<std::string, Value>;

enum class ValueType { kInt, kReal, kString, kBool };

ValueType type_of(const Value& v);

const char* value_type_name(ValueType t);

/// Formats a value for the line protocols: integers and reals bare,
/// booleans as true/false, strings double-quoted with backslash escapes.
std::string format_value(const Value& v);

/// Inverse of format_value. Bare tokens parse as int (no dot), real
/// (with dot/exponent) or bool; quoted tokens as strings.
Value parse_value(std::string_view token);

nlohmann::ordered_json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

}  // namespace neuroproxy
