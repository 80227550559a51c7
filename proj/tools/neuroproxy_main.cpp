// neuroproxy -- command-line front end: scenario runner, statistical
// validation, coding-scheme capacity tables, codec round-trips, and the
// long-running proxy server.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "neuroproxy/codecs/codecs.hpp"
#include "neuroproxy/errors.hpp"
#include "neuroproxy/harness/scenario.hpp"
#include "neuroproxy/nsp/server.hpp"

namespace {

using namespace neuroproxy;

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_signal(int)
{
    g_stop_requested = 1;
}

std::string bits_table_entry(double bits)
{
    // Matches the published presentation: big capacities are floored,
    // small ones carry two decimals.
    char buf[32];
    if (bits >= 10.0) {
        std::snprintf(buf, sizeof(buf), "%.0f", std::floor(bits));
    } else {
        std::snprintf(buf, sizeof(buf), "%.2f", bits);
    }
    return buf;
}

int run_capacity_table(std::uint32_t neurons, double window_ms, double resolution_ms,
                       std::uint32_t phases)
{
    codecs::CodecParams params;
    params.neuron_count = neurons;
    params.window_ms = window_ms;
    params.resolution_ms = resolution_ms;
    params.phase_count = phases;
    params.validate();

    struct Row {
        codecs::CodingScheme scheme;
        codecs::BigInt states;
        double bits;
        std::string note;
    };
    std::vector<Row> rows;
    for (const auto scheme :
         {codecs::CodingScheme::kTiming, codecs::CodingScheme::kRankOrder,
          codecs::CodingScheme::kSynchrony, codecs::CodingScheme::kBinaryReference,
          codecs::CodingScheme::kCount}) {
        Row row;
        row.scheme = scheme;
        row.states = codecs::capacity_states(scheme, params);
        row.bits = codecs::equivalent_bits(row.states);
        if (scheme == codecs::CodingScheme::kSynchrony) {
            char note[256];
            std::snprintf(note, sizeof(note),
                          "reference estimates list 20 equivalent bits for 3 phases (4 "
                          "distinguishable states per neuron incl. silence); the n_phases^N "
                          "formula with n_phases=%u yields %.2f",
                          phases, row.bits);
            row.note = note;
        }
        if (scheme == codecs::CodingScheme::kCount) {
            row.note = "equivalent to rate code in the one-spike regime";
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.states > b.states; });

    std::printf("scheme,states,bits,bits_table,note\n");
    for (const Row& row : rows) {
        std::printf("%s,%s,%.12g,%s,\"%s\"\n", codecs::scheme_name(row.scheme),
                    row.states.str().c_str(), row.bits, bits_table_entry(row.bits).c_str(),
                    row.note.c_str());
    }
    return 0;
}

codecs::CodecParams codec_params_from(std::uint32_t neurons, double window_ms,
                                      double resolution_ms, std::uint32_t phases,
                                      std::uint32_t base_address)
{
    codecs::CodecParams params;
    params.neuron_count = neurons;
    params.window_ms = window_ms;
    params.resolution_ms = resolution_ms;
    params.phase_count = phases;
    params.base_address = base_address;
    params.validate();
    return params;
}

std::vector<SpikeEvent> parse_event_list(const std::string& text)
{
    std::vector<SpikeEvent> events;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string item = text.substr(start, end - start);
        const std::size_t at = item.find('@');
        if (at == std::string::npos) {
            throw Error("event must be <address>@<time_ns>: " + item);
        }
        SpikeEvent e;
        e.address = static_cast<std::uint32_t>(std::stoul(item.substr(0, at)));
        e.timestamp = std::stoull(item.substr(at + 1));
        events.push_back(e);
        start = end + 1;
    }
    std::sort(events.begin(), events.end());
    return events;
}

int run_scenario_command(const std::string& path, std::optional<std::uint64_t> seed,
                         const std::string& report_path)
{
    auto config = harness::load_scenario(path);
    if (seed.has_value()) {
        config.seed = *seed;
    }
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    const auto report = harness::run_scenario(config, base_dir.empty() ? "." : base_dir);
    const std::string text = report.to_json_text();
    if (report_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write report: " + report_path);
        }
        out << text;
    }
    return 0;
}

int run_validate_command(const std::string& path, std::optional<std::uint64_t> seed)
{
    auto config = harness::load_scenario(path);
    if (seed.has_value()) {
        config.seed = *seed;
    }
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    const auto report = harness::run_scenario(config, base_dir.empty() ? "." : base_dir);
    if (!report.validation.has_value()) {
        std::fprintf(stderr, "scenario has no validation spec/dataset\n");
        return 2;
    }
    const auto& v = *report.validation;
    std::printf("trials:       %llu\n", static_cast<unsigned long long>(v.trials));
    std::printf("successes:    %llu\n", static_cast<unsigned long long>(v.successes));
    std::printf("success_rate: %.6f\n", v.success_rate);
    std::printf("std_dev:      %.6f\n", v.std_dev);
    std::printf("interval:     [%.6f, %.6f] at confidence %.3f\n", v.interval_lo, v.interval_hi,
                v.confidence);
    std::printf("required:     success >= %.6f\n", v.min_success_rate);
    std::printf("verdict:      %s\n", v.pass ? "pass" : "fail");
    return v.pass ? 0 : 1;
}

int run_serve_command(const std::string& config_path)
{
    const auto config = nsp::load_server_config(config_path);
    nsp::ProxyServer server(config);
    server.start();
    std::printf("neuroproxy serving: instance=%s aer=%u pubsub=%u query=%u\n",
                config.instance_id.c_str(), server.aer_port(), server.pubsub_port(),
                server.query_port());
    std::fflush(stdout);
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (g_stop_requested == 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"neuromorphic integration framework"};
    app.require_subcommand(1);

    // run
    std::string scenario_path;
    std::string report_path;
    std::uint64_t seed_value = 0;
    bool seed_given = false;
    auto* run_cmd = app.add_subcommand("run", "run a scenario and emit its report");
    run_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--seed", seed_value, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });
    run_cmd->add_option("--report", report_path, "write the report to this file");

    // validate
    std::string validate_path;
    std::uint64_t validate_seed = 0;
    bool validate_seed_given = false;
    auto* validate_cmd =
        app.add_subcommand("validate", "run dataset trials and print the validation report");
    validate_cmd->add_option("scenario", validate_path, "scenario file")->required();
    validate_cmd->add_option("--seed", validate_seed, "override the scenario seed")
        ->each([&](const std::string&) { validate_seed_given = true; });

    // capacity-table
    std::uint32_t neurons = 10;
    double window_ms = 10.0;
    double resolution_ms = 1.0;
    std::uint32_t phases = 3;
    auto* capacity_cmd =
        app.add_subcommand("capacity-table", "emit coding-scheme capacities as CSV");
    capacity_cmd->add_option("--N", neurons, "population size");
    capacity_cmd->add_option("--t", window_ms, "window length, ms");
    capacity_cmd->add_option("--dt", resolution_ms, "temporal resolution, ms");
    capacity_cmd->add_option("--phases", phases, "synchrony phase count");

    // encode
    std::string scheme_name = "timing";
    std::uint64_t symbol = 0;
    std::uint32_t base_address = 0;
    std::uint64_t window_start = 0;
    auto* encode_cmd = app.add_subcommand("encode", "encode a symbol as a spike train");
    encode_cmd->add_option("--scheme", scheme_name, "coding scheme")->required();
    encode_cmd->add_option("--symbol", symbol, "symbol to encode")->required();
    encode_cmd->add_option("--N", neurons, "population size");
    encode_cmd->add_option("--t", window_ms, "window length, ms");
    encode_cmd->add_option("--dt", resolution_ms, "temporal resolution, ms");
    encode_cmd->add_option("--phases", phases, "synchrony phase count");
    encode_cmd->add_option("--base", base_address, "first neuron address");
    encode_cmd->add_option("--t0", window_start, "window start, ns");

    // decode
    std::string events_text;
    auto* decode_cmd = app.add_subcommand("decode", "decode a spike train back to its symbol");
    decode_cmd->add_option("--scheme", scheme_name, "coding scheme")->required();
    decode_cmd->add_option("--events", events_text, "events as addr@ns,addr@ns,...");
    decode_cmd->add_option("--N", neurons, "population size");
    decode_cmd->add_option("--t", window_ms, "window length, ms");
    decode_cmd->add_option("--dt", resolution_ms, "temporal resolution, ms");
    decode_cmd->add_option("--phases", phases, "synchrony phase count");
    decode_cmd->add_option("--base", base_address, "first neuron address");
    decode_cmd->add_option("--t0", window_start, "window start, ns");

    // serve
    std::string serve_config;
    auto* serve_cmd = app.add_subcommand("serve", "long-running NSP + broker on real sockets");
    serve_cmd->add_option("config", serve_config, "proxy instance file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return run_scenario_command(scenario_path,
                                        seed_given ? std::optional(seed_value) : std::nullopt,
                                        report_path);
        }
        if (validate_cmd->parsed()) {
            return run_validate_command(
                validate_path, validate_seed_given ? std::optional(validate_seed) : std::nullopt);
        }
        if (capacity_cmd->parsed()) {
            return run_capacity_table(neurons, window_ms, resolution_ms, phases);
        }
        if (encode_cmd->parsed()) {
            const auto params =
                codec_params_from(neurons, window_ms, resolution_ms, phases, base_address);
            const auto events = codecs::encode(codecs::scheme_from_name(scheme_name),
                                               codecs::BigInt(symbol), params, window_start);
            for (const SpikeEvent& e : events) {
                std::printf("%u,%llu\n", e.address, static_cast<unsigned long long>(e.timestamp));
            }
            return 0;
        }
        if (decode_cmd->parsed()) {
            const auto params =
                codec_params_from(neurons, window_ms, resolution_ms, phases, base_address);
            std::string text = events_text;
            if (text.empty()) {
                // Read encode's CSV output from stdin.
                std::string line;
                while (std::getline(std::cin, line)) {
                    if (line.empty()) {
                        continue;
                    }
                    const std::size_t comma = line.find(',');
                    if (comma == std::string::npos) {
                        throw Error("stdin events must be 'address,timestamp' lines");
                    }
                    if (!text.empty()) {
                        text += ',';
                    }
                    text += line.substr(0, comma) + "@" + line.substr(comma + 1);
                }
            }
            const auto events = parse_event_list(text);
            const auto decoded = codecs::decode(codecs::scheme_from_name(scheme_name), events,
                                                params, window_start);
            std::printf("%s\n", decoded.str().c_str());
            return 0;
        }
        if (serve_cmd->parsed()) {
            return run_serve_command(serve_config);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
