#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neuroproxy/nsp/mapping.hpp"
#include "neuroproxy/snn/config.hpp"

namespace neuroproxy::decl {

/// Declarative objective document. Line-oriented grammar, '#' comments:
///
///   input <name> address <uint>
///   pattern <name> = coincidence(<name>,...) within <real>ms
///   emit <topic> when count(<pattern>) >= <uint> in <real>ms
///   validate dataset <path> expect success >= <real> confidence <real>
struct InputDecl {
    std::string name;
    std::uint32_t address = 0;

    friend bool operator==(const InputDecl&, const InputDecl&) = default;
};

struct PatternDecl {
    std::string name;
    std::vector<std::string> members;  // declared input names
    double window_ms = 1.0;            // W > 0

    friend bool operator==(const PatternDecl&, const PatternDecl&) = default;
};

struct EmissionRule {
    std::string topic;
    std::string pattern;
    std::uint32_t min_count = 1;  // k >= 1
    double horizon_ms = 1.0;      // H > 0

    friend bool operator==(const EmissionRule&, const EmissionRule&) = default;
};

struct ValidationSpec {
    std::string dataset_path;
    double min_success_rate = 1.0;  // p_min in [0, 1]
    double confidence = 0.95;       // c in (0, 1)

    friend bool operator==(const ValidationSpec&, const ValidationSpec&) = default;
};

struct ObjectiveDoc {
    std::vector<InputDecl> inputs;
    std::vector<PatternDecl> patterns;
    std::vector<EmissionRule> rules;
    std::optional<ValidationSpec> validation;

    friend bool operator==(const ObjectiveDoc&, const ObjectiveDoc&) = default;
};

/// Parses an objective document; diagnostics carry line and column.
ObjectiveDoc parse_objectives(std::string_view text);

/// Canonical text form; parse_objectives(print_objectives(d)) == d.
std::string print_objectives(const ObjectiveDoc& doc);

struct CompiledObjectives {
    snn::SnnConfig config;
    nsp::ProxyMapping mapping;
};

/// Translates objectives into a concrete SNN configuration plus the proxy
/// mapping that binds each pattern's readout to its emission rule.
///
/// Per coincidence pattern with P members and window W: one readout
/// neuron fed by every member input with weight 1 and delay 1 ms,
/// tau = 4 W, v_reset = 0, refractory = W, and threshold
/// theta = (P - 1 + S_min) / 2 where S_min is the deposit sum left by P
/// spikes spread evenly over W. The midpoint puts theta strictly between
/// the strongest non-coincidence (P - 1 simultaneous spikes) and the
/// weakest coincidence for P <= 4.
CompiledObjectives compile(const ObjectiveDoc& doc);

/// Statistical validation verdict over boolean trial outcomes.
struct ValidationReport {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_rate = 0.0;
    double std_dev = 0.0;       // sample standard deviation of 0/1 outcomes
    double interval_lo = 0.0;   // Wilson score interval at `confidence`
    double interval_hi = 0.0;
    double confidence = 0.0;
    double min_success_rate = 0.0;
    bool pass = false;          // interval_lo >= min_success_rate

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate_outcomes(const std::vector<bool>& outcomes, double min_success_rate,
                                   double confidence);

/// Convenience form pulling p_min and confidence from doc.validation.
ValidationReport validate(const ObjectiveDoc& doc, const std::vector<bool>& outcomes);

}  // namespace neuroproxy::decl
