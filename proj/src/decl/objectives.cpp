#include "neuroproxy/decl/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "neuroproxy/errors.hpp"
#include "neuroproxy/pubsub/broker.hpp"

namespace neuroproxy::decl {

namespace {

struct LineScanner {
    std::string_view line;
    std::size_t line_no;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& message) const
    {
        throw ParseError(message, line_no, pos + 1);
    }

    void skip_spaces()
    {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
            ++pos;
        }
    }

    bool done()
    {
        skip_spaces();
        return pos >= line.size();
    }

    std::string_view word()
    {
        skip_spaces();
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') {
            ++pos;
        }
        if (pos == start) {
            fail("unexpected end of line");
        }
        return line.substr(start, pos - start);
    }

    void expect_word(std::string_view expected)
    {
        const auto w = word();
        if (w != expected) {
            fail("expected '" + std::string(expected) + "', got '" + std::string(w) + "'");
        }
    }

    std::uint32_t uint_value(std::string_view text)
    {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(std::string(text), &used);
            if (used != text.size()) {
                fail("trailing characters in integer '" + std::string(text) + "'");
            }
            return static_cast<std::uint32_t>(v);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected an unsigned integer, got '" + std::string(text) + "'");
        }
    }

    double real_value(std::string_view text)
    {
        try {
            std::size_t used = 0;
            const double v = std::stod(std::string(text), &used);
            if (used != text.size()) {
                fail("trailing characters in number '" + std::string(text) + "'");
            }
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            fail("expected a number, got '" + std::string(text) + "'");
        }
    }

    /// Parses "<real>ms", e.g. "5ms" or "2.5ms".
    double ms_value(std::string_view text)
    {
        if (text.size() < 3 || text.substr(text.size() - 2) != "ms") {
            fail("expected a duration like '5ms', got '" + std::string(text) + "'");
        }
        return real_value(text.substr(0, text.size() - 2));
    }
};

std::string format_real(double v)
{
    std::ostringstream out;
    out << v;
    return out.str();
}

}  // namespace

ObjectiveDoc parse_objectives(std::string_view text)
{
    ObjectiveDoc doc;
    std::map<std::string, std::size_t> input_names;
    std::map<std::string, std::size_t> pattern_names;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        LineScanner scan{raw, line_no};
        if (scan.done()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const auto verb = scan.word();
        if (verb == "input") {
            InputDecl input;
            input.name = std::string(scan.word());
            scan.expect_word("address");
            input.address = scan.uint_value(scan.word());
            if (input_names.contains(input.name)) {
                scan.fail("duplicate input name '" + input.name + "'");
            }
            input_names[input.name] = doc.inputs.size();
            doc.inputs.push_back(std::move(input));
        } else if (verb == "pattern") {
            PatternDecl pattern;
            pattern.name = std::string(scan.word());
            scan.expect_word("=");
            scan.skip_spaces();
            // coincidence(<name>,...) within <real>ms
            const auto call = scan.word();
            constexpr std::string_view kPrefix = "coincidence(";
            if (call.substr(0, kPrefix.size()) != kPrefix || call.back() != ')') {
                scan.fail("expected coincidence(<input>,...)");
            }
            std::string_view members = call.substr(kPrefix.size(), call.size() - kPrefix.size() - 1);
            while (!members.empty()) {
                const std::size_t comma = members.find(',');
                std::string_view member =
                    comma == std::string_view::npos ? members : members.substr(0, comma);
                if (member.empty()) {
                    scan.fail("empty member in coincidence(...)");
                }
                if (!input_names.contains(std::string(member))) {
                    scan.fail("unknown input '" + std::string(member) + "'");
                }
                pattern.members.emplace_back(member);
                if (comma == std::string_view::npos) {
                    break;
                }
                members = members.substr(comma + 1);
            }
            scan.expect_word("within");
            pattern.window_ms = scan.ms_value(scan.word());
            if (pattern.window_ms <= 0.0) {
                scan.fail("pattern window must be > 0 ms");
            }
            if (pattern_names.contains(pattern.name)) {
                scan.fail("duplicate pattern name '" + pattern.name + "'");
            }
            if (input_names.contains(pattern.name)) {
                scan.fail("pattern name '" + pattern.name + "' already names an input");
            }
            pattern_names[pattern.name] = doc.patterns.size();
            doc.patterns.push_back(std::move(pattern));
        } else if (verb == "emit") {
            EmissionRule rule;
            rule.topic = std::string(scan.word());
            pubsub::validate_topic(rule.topic);
            scan.expect_word("when");
            const auto call = scan.word();
            constexpr std::string_view kPrefix = "count(";
            if (call.substr(0, kPrefix.size()) != kPrefix || call.back() != ')') {
                scan.fail("expected count(<pattern>)");
            }
            rule.pattern = std::string(call.substr(kPrefix.size(), call.size() - kPrefix.size() - 1));
            if (!pattern_names.contains(rule.pattern)) {
                scan.fail("unknown pattern '" + rule.pattern + "'");
            }
            scan.expect_word(">=");
            rule.min_count = scan.uint_value(scan.word());
            if (rule.min_count < 1) {
                scan.fail("emission count must be >= 1");
            }
            scan.expect_word("in");
            rule.horizon_ms = scan.ms_value(scan.word());
            if (rule.horizon_ms <= 0.0) {
                scan.fail("emission horizon must be > 0 ms");
            }
            doc.rules.push_back(std::move(rule));
        } else if (verb == "validate") {
            ValidationSpec spec;
            scan.expect_word("dataset");
            spec.dataset_path = std::string(scan.word());
            scan.expect_word("expect");
            scan.expect_word("success");
            scan.expect_word(">=");
            spec.min_success_rate = scan.real_value(scan.word());
            scan.expect_word("confidence");
            spec.confidence = scan.real_value(scan.word());
            if (spec.min_success_rate < 0.0 || spec.min_success_rate > 1.0) {
                scan.fail("expected success rate in [0, 1]");
            }
            if (spec.confidence <= 0.0 || spec.confidence >= 1.0) {
                scan.fail("confidence must lie in (0, 1)");
            }
            doc.validation = std::move(spec);
        } else {
            scan.fail("unknown declaration '" + std::string(verb) + "'");
        }
        if (!scan.done()) {
            scan.fail("trailing input");
        }
        if (end == text.size()) {
            break;
        }
    }
    return doc;
}

std::string print_objectives(const ObjectiveDoc& doc)
{
    std::string out;
    for (const InputDecl& input : doc.inputs) {
        out += "input " + input.name + " address " + std::to_string(input.address) + "\n";
    }
    for (const PatternDecl& pattern : doc.patterns) {
        out += "pattern " + pattern.name + " = coincidence(";
        for (std::size_t i = 0; i < pattern.members.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += pattern.members[i];
        }
        out += ") within " + format_real(pattern.window_ms) + "ms\n";
    }
    for (const EmissionRule& rule : doc.rules) {
        out += "emit " + rule.topic + " when count(" + rule.pattern +
               ") >= " + std::to_string(rule.min_count) + " in " + format_real(rule.horizon_ms) +
               "ms\n";
    }
    if (doc.validation.has_value()) {
        out += "validate dataset " + doc.validation->dataset_path + " expect success >= " +
               format_real(doc.validation->min_success_rate) + " confidence " +
               format_real(doc.validation->confidence) + "\n";
    }
    return out;
}

CompiledObjectives compile(const ObjectiveDoc& doc)
{
    CompiledObjectives out;

    std::map<std::string, std::uint32_t> input_address;
    std::uint32_t max_input = 0;
    for (const InputDecl& input : doc.inputs) {
        input_address[input.name] = input.address;
        max_input = std::max(max_input, input.address);
        out.config.input_addresses.insert(input.address);
    }

    std::map<std::string, std::uint32_t> readout_of_pattern;
    std::uint32_t next_id = doc.inputs.empty() ? 0 : max_input + 1;
    for (const PatternDecl& pattern : doc.patterns) {
        const auto member_count = static_cast<std::uint32_t>(pattern.members.size());
        if (member_count == 0) {
            throw CompileError("pattern '" + pattern.name + "' has no members");
        }
        const double window = pattern.window_ms;
        const double tau = 4.0 * window;
        double deposit_sum = 1.0;  // S_min; the evenly spread coincidence sum
        if (member_count > 1) {
            deposit_sum = 0.0;
            for (std::uint32_t i = 0; i < member_count; ++i) {
                deposit_sum += std::exp(-static_cast<double>(i) * window /
                                        (static_cast<double>(member_count - 1) * tau));
            }
        }
        const double threshold = (static_cast<double>(member_count) - 1.0 + deposit_sum) / 2.0;

        snn::NeuronParams neuron;
        neuron.id = next_id++;
        neuron.threshold = threshold;
        neuron.tau_mem_ms = tau;
        neuron.v_reset = 0.0;
        neuron.refractory_ms = window;
        out.config.neurons.push_back(neuron);
        out.config.readout_ids.insert(neuron.id);
        readout_of_pattern[pattern.name] = neuron.id;

        for (const std::string& member : pattern.members) {
            const auto it = input_address.find(member);
            if (it == input_address.end()) {
                throw CompileError("pattern '" + pattern.name + "' references unknown input '" +
                                   member + "'");
            }
            snn::SynapseParams synapse;
            synapse.src = it->second;
            synapse.dst = neuron.id;
            synapse.weight = 1.0;
            synapse.delay_ms = 1.0;
            out.config.synapses.push_back(synapse);
        }
    }

    for (const EmissionRule& rule : doc.rules) {
        const auto it = readout_of_pattern.find(rule.pattern);
        if (it == readout_of_pattern.end()) {
            throw CompileError("emission rule references unknown pattern '" + rule.pattern + "'");
        }
        nsp::MappingRule mapped;
        mapped.readout_address = it->second;
        mapped.topic = rule.topic;
        mapped.min_count = rule.min_count;
        mapped.horizon = ns_from_ms(rule.horizon_ms);
        mapped.snapshot = true;
        out.mapping.rules.push_back(std::move(mapped));
    }

    out.config.validate();
    return out;
}

ValidationReport validate_outcomes(const std::vector<bool>& outcomes, double min_success_rate,
                                   double confidence)
{
    if (outcomes.empty()) {
        throw Error("validation requires at least one trial");
    }
    if (confidence <= 0.0 || confidence >= 1.0) {
        throw Error("confidence must lie in (0, 1)");
    }
    ValidationReport report;
    report.trials = outcomes.size();
    report.successes = static_cast<std::uint64_t>(std::count(outcomes.begin(), outcomes.end(), true));
    const double n = static_cast<double>(report.trials);
    const double p = static_cast<double>(report.successes) / n;
    report.success_rate = p;
    report.std_dev = report.trials < 2 ? 0.0 : std::sqrt(n * p * (1.0 - p) / (n - 1.0));
    report.confidence = confidence;
    report.min_success_rate = min_success_rate;

    const boost::math::normal_distribution<double> normal;
    const double z = boost::math::quantile(normal, 0.5 + confidence / 2.0);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    report.interval_lo = std::clamp(center - half, 0.0, 1.0);
    report.interval_hi = std::clamp(center + half, 0.0, 1.0);
    report.pass = report.interval_lo >= min_success_rate;
    return report;
}

ValidationReport validate(const ObjectiveDoc& doc, const std::vector<bool>& outcomes)
{
    if (!doc.validation.has_value()) {
        throw Error("objective document declares no validation spec");
    }
    return validate_outcomes(outcomes, doc.validation->min_success_rate,
                             doc.validation->confidence);
}

}  // namespace neuroproxy::decl
