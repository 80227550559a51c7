#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neuroproxy {

/// Base class for all structured errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection of a structurally invalid SNN configuration (duplicate ids,
/// dangling synapse endpoints, nonpositive time constants or delays).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Rejected spike injection: unknown source address or a timestamp behind
/// the instance clock.
class InjectError : public Error {
public:
    using Error::Error;
};

/// AER encode/decode failure. Decode errors carry the byte offset at which
/// the problem was detected.
class WireError : public Error {
public:
    WireError(const std::string& message, std::size_t offset)
        : Error(message + " (offset " + std::to_string(offset) + ")"), offset_(offset)
    {
    }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// An input stream handed to the merger was not ordered.
class MergeError : public Error {
public:
    MergeError(const std::string& message, std::size_t stream_index)
        : Error(message), stream_index_(stream_index)
    {
    }
    std::size_t stream_index() const { return stream_index_; }

private:
    std::size_t stream_index_;
};

/// Invalid codec parameters, out-of-range symbols, or undecodable trains.
class CodecError : public Error {
public:
    using Error::Error;
};

/// Logical-clock regression handed to a soft-state store.
class TimeError : public Error {
public:
    using Error::Error;
};

/// Malformed topic pattern or notification handed to the broker.
class PatternError : public Error {
public:
    using Error::Error;
};

/// Graph mutation or query violating the store invariants or schema.
class GraphError : public Error {
public:
    using Error::Error;
};

/// Parse failure with source position, used by the objective grammar and
/// the graph query text form.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message + " at line " + std::to_string(line) + ", column " +
                std::to_string(column)),
          line_(line),
          column_(column)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Objective document that parses but cannot be compiled to an SNN config.
class CompileError : public Error {
public:
    using Error::Error;
};

/// The NC device behind a proxy could not be reached.
class DeviceError : public Error {
public:
    using Error::Error;
};

/// Scenario file or wiring problems in the harness.
class ScenarioError : public Error {
public:
    using Error::Error;
};

/// Socket/file I/O failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace neuroproxy
