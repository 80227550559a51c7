#include "neuroproxy/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "neuroproxy/aer/wire.hpp"
#include "neuroproxy/harness/sim.hpp"
#include "neuroproxy/log.hpp"
#include "neuroproxy/nsp/control.hpp"
#include "neuroproxy/nsp/proxy.hpp"
#include "neuroproxy/snn/network.hpp"

namespace neuroproxy::harness {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scenario file loading

namespace {

LatencySpec latency_from_json(const nlohmann::json& j)
{
    if (j.is_array()) {
        if (j.size() != 2) {
            throw ScenarioError("latency range must be [low_ms, high_ms]");
        }
        const TimeNs low = ns_from_ms(j[0].get<double>());
        const TimeNs high = ns_from_ms(j[1].get<double>());
        if (high < low) {
            throw ScenarioError("latency range must satisfy low <= high");
        }
        return LatencySpec{low, high};
    }
    return LatencySpec::fixed(ns_from_ms(j.get<double>()));
}

std::string join_path(const std::string& base, const std::string& path)
{
    if (path.empty() || path.front() == '/') {
        return path;
    }
    return base.empty() ? path : base + "/" + path;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open file: " + path);
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("bad scenario JSON: ") + e.what());
    }
    ScenarioConfig config;
    config.name = doc.value("name", "scenario");
    config.seed = doc.value("seed", 0ULL);
    config.duration = ns_from_ms(doc.value("duration_ms", 1000.0));
    config.objectives_path = doc.value("objectives", "");
    config.dataset_path = doc.value("dataset", "");
    config.trial_start = ns_from_ms(doc.value("trial_start_ms", 10.0));
    for (const auto& jp : doc.value("processes", nlohmann::json::array())) {
        ProcessSpec spec;
        spec.name = jp.at("name").get<std::string>();
        spec.kind = jp.at("kind").get<std::string>();
        spec.params = jp.value("params", nlohmann::json::object());
        config.processes.push_back(std::move(spec));
    }
    for (const auto& jc : doc.value("channels", nlohmann::json::array())) {
        ChannelSpec spec;
        spec.name = jc.at("name").get<std::string>();
        spec.from = jc.at("from").get<std::string>();
        spec.to = jc.at("to").get<std::string>();
        spec.latency = jc.contains("latency_ms") ? latency_from_json(jc.at("latency_ms"))
                                                 : LatencySpec::fixed(0);
        spec.loss_prob = jc.value("loss", 0.0);
        config.channels.push_back(std::move(spec));
    }
    config.validate();
    return config;
}

ScenarioConfig load_scenario(const std::string& path)
{
    return scenario_from_json_text(read_file(path));
}

void ScenarioConfig::validate() const
{
    if (duration == 0) {
        throw ScenarioError("scenario duration must be positive");
    }
    std::set<std::string> names;
    static const std::set<std::string> kKinds = {
        "signal_source", "lebesgue_sensor", "symbol_source", "codec_encoder",
        "nc_system",     "nsp",             "broker",        "subscriber_probe",
    };
    for (const ProcessSpec& p : processes) {
        if (!names.insert(p.name).second) {
            throw ScenarioError("duplicate process name '" + p.name + "'");
        }
        if (!kKinds.contains(p.kind)) {
            throw ScenarioError("unknown process kind '" + p.kind + "'");
        }
    }
    for (const ChannelSpec& c : channels) {
        if (c.loss_prob < 0.0 || c.loss_prob > 1.0) {
            throw ScenarioError("channel '" + c.name + "': loss probability outside [0, 1]");
        }
        for (const std::string& endpoint : {c.from, c.to}) {
            const std::size_t dot = endpoint.find('.');
            if (dot == std::string::npos) {
                throw ScenarioError("channel '" + c.name + "': endpoint '" + endpoint +
                                    "' must be 'process.port'");
            }
            if (!names.contains(endpoint.substr(0, dot))) {
                throw ScenarioError("channel '" + c.name + "': unknown process in '" + endpoint +
                                    "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Processes

namespace {

class SignalSourceProcess final : public Process {
public:
    SignalSourceProcess(std::string name, const nlohmann::json& params)
        : Process(std::move(name), "signal_source")
    {
        waveform_ = params.value("waveform", "ramp");
        start_value_ = params.value("start", 0.0);
        end_value_ = params.value("end", 1.0);
        amplitude_ = params.value("amplitude", 1.0);
        level_ = params.value("level", 0.0);
        period_ = ns_from_ms(params.value("period_ms", 100.0));
        interval_ = ns_from_ms(params.value("sample_interval_ms", 1.0));
        duration_ = ns_from_ms(params.value("duration_ms", 100.0));
        begin_ = ns_from_ms(params.value("start_ms", 0.0));
        if (interval_ == 0) {
            throw ScenarioError("signal_source sample interval must be positive");
        }
    }

    void start(Simulation& sim) override
    {
        for (TimeNs t = 0; t <= duration_; t += interval_) {
            codecs::Sample sample;
            sample.time = begin_ + t;
            sample.value = value_at(t);
            sim.emit(*this, "out", sample.time, sample);
        }
    }

    void activate(Simulation&, TimeNs, const std::string&, const Payload&) override {}

private:
    double value_at(TimeNs t) const
    {
        const double progress =
            duration_ == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(duration_);
        if (waveform_ == "ramp") {
            return start_value_ + (end_value_ - start_value_) * progress;
        }
        if (waveform_ == "sine") {
            const double phase = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(period_);
            return level_ + amplitude_ * std::sin(phase);
        }
        if (waveform_ == "const") {
            return level_;
        }
        throw ScenarioError("unknown waveform '" + waveform_ + "'");
    }

    std::string waveform_;
    double start_value_, end_value_, amplitude_, level_;
    TimeNs period_, interval_, duration_, begin_;
};

class LebesgueSensorProcess final : public Process {
public:
    LebesgueSensorProcess(std::string name, const nlohmann::json& params)
        : Process(std::move(name), "lebesgue_sensor"),
          encoder_(params.value("delta", 0.25), params.value("up_address", 0u),
                   params.value("down_address", 1u))
    {
    }

    void activate(Simulation& sim, TimeNs, const std::string&, const Payload& payload) override
    {
        const auto* sample = std::get_if<codecs::Sample>(&payload);
        if (sample == nullptr) {
            return;
        }
        for (const SpikeEvent& event : encoder_.push(*sample)) {
            sim.emit(*this, "out", event.timestamp, event);
        }
    }

private:
    codecs::LebesgueEncoder encoder_;
};

class SymbolSourceProcess final : public Process {
public:
    SymbolSourceProcess(std::string name, const nlohmann::json&)
        : Process(std::move(name), "symbol_source")
    {
    }

    void configure(TrialDataset dataset, TimeNs first_trial_start)
    {
        dataset_ = std::move(dataset);
        first_start_ = first_trial_start;
    }

    void start(Simulation& sim) override
    {
        TimeNs trial_start = first_start_;
        for (const TrialSpec& trial : dataset_.trials) {
            if (trial.symbol.has_value()) {
                sim.emit(*this, "out", trial_start, SymbolMsg{*trial.symbol});
            }
            for (const SpikeEvent& spike : trial.spikes) {
                sim.emit(*this, "out", trial_start + spike.timestamp,
                         SpikeEvent{spike.address, trial_start + spike.timestamp});
            }
            trial_start += trial.spacing;
        }
    }

    void activate(Simulation&, TimeNs, const std::string&, const Payload&) override {}

    const TrialDataset& dataset() const { return dataset_; }
    TimeNs first_start() const { return first_start_; }

private:
    TrialDataset dataset_;
    TimeNs first_start_ = 0;
};

class CodecEncoderProcess final : public Process {
public:
    CodecEncoderProcess(std::string name, const nlohmann::json& params)
        : Process(std::move(name), "codec_encoder")
    {
        scheme_ = codecs::scheme_from_name(params.value("scheme", "timing"));
        params_.neuron_count = params.value("N", 1u);
        params_.window_ms = params.value("t_ms", 10.0);
        params_.resolution_ms = params.value("dt_ms", 1.0);
        params_.phase_count = params.value("phases", 1u);
        params_.base_address = params.value("base_address", 0u);
        params_.validate();
    }

    void activate(Simulation& sim, TimeNs now, const std::string&, const Payload& payload) override
    {
        const auto* symbol = std::get_if<SymbolMsg>(&payload);
        if (symbol == nullptr) {
            return;
        }
        for (const SpikeEvent& event :
             codecs::encode(scheme_, codecs::BigInt(symbol->symbol), params_, now)) {
            sim.emit(*this, "out", event.timestamp, event);
        }
    }

private:
    codecs::CodingScheme scheme_;
    codecs::CodecParams params_;
};

class NcProcess final : public Process {
public:
    NcProcess(std::string name, const nlohmann::json&)
        : Process(std::move(name), "nc_system"), instance_(snn::SnnConfig{})
    {
    }

    void activate(Simulation& sim, TimeNs now, const std::string& port,
                  const Payload& payload) override
    {
        if (port == "in") {
            if (const auto* event = std::get_if<SpikeEvent>(&payload)) {
                try {
                    // Spike arrival carries its channel delivery time.
                    const SpikeEvent arrived{event->address, now};
                    instance_.inject(std::span(&arrived, 1));
                    ++injected_;
                    schedule_tick(sim);
                } catch (const InjectError&) {
                    ++rejected_;
                }
            }
            return;
        }
        if (port == "config") {
            if (const auto* bytes = std::get_if<BytesMsg>(&payload)) {
                std::vector<SpikeEvent> emitted;
                nsp::handle_device_control(instance_, bytes->bytes, now, &emitted);
                ++config_pushes_;
                emit_spikes(sim, emitted);
                schedule_tick(sim);
            }
            return;
        }
        if (port == "tick") {
            emit_spikes(sim, instance_.advance(now));
            schedule_tick(sim);
        }
    }

    /// Synchronous control exchange used for snapshot requests; readout
    /// spikes surfaced by the internal advance still leave through the
    /// normal output port.
    std::vector<std::uint8_t> control_roundtrip(Simulation& sim,
                                                const std::vector<std::uint8_t>& request)
    {
        std::vector<SpikeEvent> emitted;
        auto reply = nsp::handle_device_control(instance_, request, sim.now(), &emitted);
        emit_spikes(sim, emitted);
        schedule_tick(sim);
        return reply;
    }

    std::uint64_t injected() const { return injected_; }
    std::uint64_t rejected() const { return rejected_; }
    std::uint64_t config_pushes() const { return config_pushes_; }
    std::uint64_t output_spikes() const { return output_spikes_; }

private:
    void emit_spikes(Simulation& sim, const std::vector<SpikeEvent>& spikes)
    {
        for (const SpikeEvent& spike : spikes) {
            ++output_spikes_;
            const auto bytes = aer::encode_packet(aer::AerPacket::make_events({spike}));
            sim.emit(*this, "out", spike.timestamp, BytesMsg{bytes});
        }
    }

    void schedule_tick(Simulation& sim)
    {
        const auto next = instance_.next_pending_time();
        if (!next.has_value()) {
            return;
        }
        if (scheduled_.contains(*next)) {
            return;
        }
        scheduled_.insert(*next);
        sim.schedule(name(), "tick", *next, SymbolMsg{});
    }

    snn::NetworkInstance instance_;
    std::set<TimeNs> scheduled_;
    std::uint64_t injected_ = 0;
    std::uint64_t rejected_ = 0;
    std::uint64_t config_pushes_ = 0;
    std::uint64_t output_spikes_ = 0;
};

class NspProcess final : public Process {
public:
    class DesDeviceLink final : public nsp::DeviceLink {
    public:
        void bind(Simulation* sim, NspProcess* owner, NcProcess* device)
        {
            sim_ = sim;
            owner_ = owner;
            device_ = device;
        }

        void push_config(const snn::SnnConfig& config) override
        {
            if (sim_ == nullptr || owner_ == nullptr) {
                throw DeviceError("device link is not wired");
            }
            const auto bytes = aer::encode_packet(nsp::make_control_packet(nsp::ConfigPush{config}));
            sim_->emit(*owner_, "config", sim_->now(), BytesMsg{bytes});
        }

        snn::TransientState request_transient() override
        {
            if (sim_ == nullptr || device_ == nullptr) {
                throw DeviceError("NC device is not reachable");
            }
            const auto request =
                aer::encode_packet(nsp::make_control_packet(nsp::SnapshotRequest{}));
            const auto reply_bytes = device_->control_roundtrip(*sim_, request);
            const auto decoded = aer::decode_packet(reply_bytes);
            return std::get<nsp::SnapshotReply>(nsp::parse_control_packet(decoded.packet)).state;
        }

    private:
        Simulation* sim_ = nullptr;
        NspProcess* owner_ = nullptr;
        NcProcess* device_ = nullptr;
    };

    NspProcess(std::string name, const nlohmann::json& params)
        : Process(std::move(name), "nsp"), link_(std::make_shared<DesDeviceLink>())
    {
        nsp::ProxyConfig config;
        config.instance_id = params.value("instance", this->name());
        if (params.contains("softstate_interval_ms")) {
            config.softstate_defaults.refresh_interval =
                ns_from_ms(params.at("softstate_interval_ms").get<double>());
        }
        config.softstate_defaults.miss_threshold = params.value("miss_threshold", 3u);
        if (params.contains("snapshot_max_age_ms")) {
            config.snapshot_max_age = ns_from_ms(params.at("snapshot_max_age_ms").get<double>());
        }
        proxy_ = std::make_unique<nsp::NspProxy>(config, link_);
    }

    void wire(Simulation* sim, NcProcess* device, std::optional<decl::ObjectiveDoc> objectives)
    {
        link_->bind(sim, this, device);
        objectives_ = std::move(objectives);
    }

    void start(Simulation&) override
    {
        if (objectives_.has_value()) {
            proxy_->apply_objectives(*objectives_);
            applied_ = true;
        }
    }

    void activate(Simulation& sim, TimeNs now, const std::string& port,
                  const Payload& payload) override
    {
        if (port != "spikes") {
            return;
        }
        const auto* bytes = std::get_if<BytesMsg>(&payload);
        if (bytes == nullptr) {
            return;
        }
        decoder_.feed(bytes->bytes);
        while (auto packet = decoder_.next()) {
            if (packet->kind != aer::PacketKind::kEvents) {
                continue;
            }
            ++event_packets_;
            for (const SpikeEvent& spike : packet->events) {
                for (auto& notification : proxy_->on_output_spike(spike)) {
                    sim.emit(*this, "events", now, std::move(notification));
                }
            }
        }
    }

    nsp::NspProxy& proxy() { return *proxy_; }
    bool objectives_applied() const { return applied_; }
    std::uint64_t event_packets() const { return event_packets_; }

private:
    std::shared_ptr<DesDeviceLink> link_;
    std::unique_ptr<nsp::NspProxy> proxy_;
    std::optional<decl::ObjectiveDoc> objectives_;
    aer::StreamDecoder decoder_;
    bool applied_ = false;
    std::uint64_t event_packets_ = 0;
};

class BrokerProcess final : public Process {
public:
    BrokerProcess(std::string name, const nlohmann::json&) : Process(std::move(name), "broker") {}

    void register_probe(const std::string& probe_name, const pubsub::TopicPattern& pattern,
                        std::optional<pubsub::Predicate> predicate)
    {
        const auto id = broker_.subscribe(pattern, std::move(predicate));
        probe_subs_.emplace_back(id, probe_name);
    }

    void activate(Simulation& sim, TimeNs now, const std::string& port,
                  const Payload& payload) override
    {
        if (port != "in") {
            return;
        }
        const auto* notification = std::get_if<pubsub::Notification>(&payload);
        if (notification == nullptr) {
            return;
        }
        ++published_;
        broker_.publish(*notification);
        for (const auto& [id, probe] : probe_subs_) {
            for (auto& delivery : broker_.poll(id)) {
                sim.emit(*this, "out." + probe, now, std::move(delivery));
            }
        }
    }

    std::uint64_t published() const { return published_; }

private:
    pubsub::Broker broker_;
    std::vector<std::pair<std::uint64_t, std::string>> probe_subs_;
    std::uint64_t published_ = 0;
};

class ProbeProcess final : public Process {
public:
    ProbeProcess(std::string name, const nlohmann::json& params)
        : Process(std::move(name), "subscriber_probe")
    {
        pattern_text_ = params.value("pattern", "#");
        if (params.contains("predicate")) {
            predicate_text_ = params.at("predicate").get<std::string>();
        }
        broker_name_ = params.value("broker", "");
    }

    void activate(Simulation&, TimeNs now, const std::string&, const Payload& payload) override
    {
        if (const auto* n = std::get_if<pubsub::Notification>(&payload)) {
            records_.push_back(ProbeRecord{now, *n});
        } else if (const auto* e = std::get_if<SpikeEvent>(&payload)) {
            ++spikes_seen_;
            (void)e;
        } else if (std::holds_alternative<codecs::Sample>(payload)) {
            ++samples_seen_;
        }
    }

    const std::string& pattern_text() const { return pattern_text_; }
    const std::optional<std::string>& predicate_text() const { return predicate_text_; }
    const std::string& broker_name() const { return broker_name_; }
    const std::vector<ProbeRecord>& records() const { return records_; }
    std::uint64_t spikes_seen() const { return spikes_seen_; }

private:
    std::string pattern_text_;
    std::optional<std::string> predicate_text_;
    std::string broker_name_;
    std::vector<ProbeRecord> records_;
    std::uint64_t spikes_seen_ = 0;
    std::uint64_t samples_seen_ = 0;
};

std::unique_ptr<Process> make_process(const ProcessSpec& spec)
{
    if (spec.kind == "signal_source") {
        return std::make_unique<SignalSourceProcess>(spec.name, spec.params);
    }
    if (spec.kind == "lebesgue_sensor") {
        return std::make_unique<LebesgueSensorProcess>(spec.name, spec.params);
    }
    if (spec.kind == "symbol_source") {
        return std::make_unique<SymbolSourceProcess>(spec.name, spec.params);
    }
    if (spec.kind == "codec_encoder") {
        return std::make_unique<CodecEncoderProcess>(spec.name, spec.params);
    }
    if (spec.kind == "nc_system") {
        return std::make_unique<NcProcess>(spec.name, spec.params);
    }
    if (spec.kind == "nsp") {
        return std::make_unique<NspProcess>(spec.name, spec.params);
    }
    if (spec.kind == "broker") {
        return std::make_unique<BrokerProcess>(spec.name, spec.params);
    }
    if (spec.kind == "subscriber_probe") {
        return std::make_unique<ProbeProcess>(spec.name, spec.params);
    }
    throw ScenarioError("unknown process kind '" + spec.kind + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Report

ordered_json ScenarioReport::to_json() const
{
    ordered_json doc;
    doc["scenario"] = scenario;
    doc["seed"] = seed;
    doc["duration_ns"] = duration;
    doc["processes"] = ordered_json::array();
    for (const ProcessStats& p : processes) {
        ordered_json jp;
        jp["name"] = p.name;
        jp["kind"] = p.kind;
        jp["activations"] = p.activations;
        jp["emitted"] = p.emitted;
        doc["processes"].push_back(std::move(jp));
    }
    doc["channels"] = ordered_json::array();
    for (const ChannelReport& c : channels) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["sent"] = c.stats.sent;
        jc["delivered"] = c.stats.delivered;
        jc["dropped"] = c.stats.dropped;
        doc["channels"].push_back(std::move(jc));
    }
    doc["notifications"] = ordered_json::array();
    for (const ProbeRecord& r : probe_records) {
        ordered_json jr;
        jr["delivery_time"] = r.delivery_time;
        jr["publish_time"] = r.notification.publish_time;
        jr["topic"] = r.notification.topic;
        jr["publisher"] = r.notification.publisher;
        jr["seq"] = r.notification.publish_seq;
        jr["payload_ref"] = r.notification.payload_ref;
        jr["attributes"] = ordered_json::object();
        for (const auto& [name, value] : r.notification.attributes) {
            jr["attributes"][name] = value_to_json(value);
        }
        doc["notifications"].push_back(std::move(jr));
    }
    doc["trials"] = ordered_json::array();
    for (const bool outcome : trial_outcomes) {
        doc["trials"].push_back(outcome);
    }
    if (validation.has_value()) {
        ordered_json jv;
        jv["trials"] = validation->trials;
        jv["successes"] = validation->successes;
        jv["success_rate"] = validation->success_rate;
        jv["std_dev"] = validation->std_dev;
        jv["interval_lo"] = validation->interval_lo;
        jv["interval_hi"] = validation->interval_hi;
        jv["confidence"] = validation->confidence;
        jv["min_success_rate"] = validation->min_success_rate;
        jv["verdict"] = validation->pass ? "pass" : "fail";
        doc["validation"] = std::move(jv);
    }
    ordered_json ji;
    ji["snn_config_pushes"] = interfaces.snn_config_pushes;
    ji["input_spikes"] = interfaces.input_spikes;
    ji["output_spike_packets"] = interfaces.output_spike_packets;
    ji["objectives_applied"] = interfaces.objectives_applied;
    ji["system_state_neurons"] = interfaces.system_state_neurons;
    ji["system_state_digest"] = interfaces.system_state_digest;
    ji["notifications"] = interfaces.notifications;
    ji["output_data_query"] = interfaces.output_data_query;
    ji["output_data"] = interfaces.output_data;
    doc["interfaces"] = std::move(ji);
    doc["unmapped_spikes"] = unmapped_spikes;
    return doc;
}

// ---------------------------------------------------------------------------
// run_scenario

ScenarioReport run_scenario(const ScenarioConfig& config, const std::string& base_dir)
{
    config.validate();

    std::optional<decl::ObjectiveDoc> objectives;
    if (!config.objectives_path.empty()) {
        objectives = decl::parse_objectives(read_file(join_path(base_dir, config.objectives_path)));
    }
    std::optional<TrialDataset> dataset;
    std::string dataset_path = config.dataset_path;
    if (dataset_path.empty() && objectives.has_value() && objectives->validation.has_value()) {
        dataset_path = objectives->validation->dataset_path;
    }
    if (!dataset_path.empty()) {
        dataset = load_dataset(join_path(base_dir, dataset_path));
    }

    Simulation sim(config.seed);
    for (const ProcessSpec& spec : config.processes) {
        sim.add_process(make_process(spec));
    }
    for (const ChannelSpec& spec : config.channels) {
        sim.add_channel(spec.name, spec.from, spec.to, spec.latency, spec.loss_prob);
    }

    // Wire NSP device links: the NC process behind each "<nsp>.config"
    // channel, if any.
    TimeNs max_horizon = 0;
    for (const ProcessSpec& spec : config.processes) {
        if (spec.kind != "nsp") {
            continue;
        }
        auto* nsp_process = dynamic_cast<NspProcess*>(sim.find_process(spec.name));
        NcProcess* device = nullptr;
        for (const ChannelSpec& channel : config.channels) {
            if (channel.from == spec.name + ".config") {
                const std::string to_process = channel.to.substr(0, channel.to.find('.'));
                device = dynamic_cast<NcProcess*>(sim.find_process(to_process));
            }
        }
        nsp_process->wire(&sim, device, objectives);
    }
    if (objectives.has_value()) {
        for (const auto& rule : decl::compile(*objectives).mapping.rules) {
            max_horizon = std::max(max_horizon, rule.horizon);
        }
    }

    // Probe subscriptions.
    for (const ProcessSpec& spec : config.processes) {
        if (spec.kind != "subscriber_probe") {
            continue;
        }
        auto* probe = dynamic_cast<ProbeProcess*>(sim.find_process(spec.name));
        BrokerProcess* broker = nullptr;
        if (!probe->broker_name().empty()) {
            broker = dynamic_cast<BrokerProcess*>(sim.find_process(probe->broker_name()));
        } else {
            for (const ProcessSpec& other : config.processes) {
                if (other.kind == "broker") {
                    broker = dynamic_cast<BrokerProcess*>(sim.find_process(other.name));
                    break;
                }
            }
        }
        if (broker == nullptr) {
            continue;  // probe fed directly by a channel
        }
        std::optional<pubsub::Predicate> predicate;
        if (probe->predicate_text().has_value()) {
            predicate = pubsub::Predicate::parse(*probe->predicate_text());
        }
        broker->register_probe(spec.name, pubsub::TopicPattern::parse(probe->pattern_text()),
                               std::move(predicate));
    }

    // Trial playback.
    for (const ProcessSpec& spec : config.processes) {
        if (spec.kind != "symbol_source") {
            continue;
        }
        auto* source = dynamic_cast<SymbolSourceProcess*>(sim.find_process(spec.name));
        if (dataset.has_value()) {
            for (const TrialSpec& trial : dataset->trials) {
                if (trial.spacing <= max_horizon) {
                    throw ScenarioError("trial spacing must exceed the emission horizon");
                }
            }
            source->configure(*dataset, config.trial_start);
        }
    }

    sim.run(config.duration);

    // -----------------------------------------------------------------
    // Assemble the report.
    ScenarioReport report;
    report.scenario = config.name;
    report.seed = config.seed;
    report.duration = config.duration;
    for (const ProcessSpec& spec : config.processes) {
        ScenarioReport::ProcessStats stats;
        stats.name = spec.name;
        stats.kind = spec.kind;
        stats.activations = sim.activations(spec.name);
        stats.emitted = sim.emissions(spec.name);
        report.processes.push_back(std::move(stats));
    }
    for (const ChannelSpec& spec : config.channels) {
        report.channels.push_back(ScenarioReport::ChannelReport{spec.name,
                                                                sim.channel_stats(spec.name)});
    }

    std::vector<const ProbeProcess*> probes;
    for (const ProcessSpec& spec : config.processes) {
        if (spec.kind == "subscriber_probe") {
            probes.push_back(dynamic_cast<const ProbeProcess*>(sim.find_process(spec.name)));
        }
    }
    for (const ProbeProcess* probe : probes) {
        report.probe_records.insert(report.probe_records.end(), probe->records().begin(),
                                    probe->records().end());
    }
    std::stable_sort(report.probe_records.begin(), report.probe_records.end(),
                     [](const ProbeRecord& a, const ProbeRecord& b) {
                         if (a.delivery_time != b.delivery_time) {
                             return a.delivery_time < b.delivery_time;
                         }
                         return a.notification.publish_seq < b.notification.publish_seq;
                     });

    // Trial outcomes: a trial succeeds when (notification fired within the
    // trial window) equals the expected flag.
    if (dataset.has_value()) {
        TimeNs trial_start = config.trial_start;
        for (const TrialSpec& trial : dataset->trials) {
            const TimeNs window_end = trial_start + trial.spacing;
            bool fired = false;
            for (const ProbeRecord& record : report.probe_records) {
                if (record.notification.publish_time >= trial_start &&
                    record.notification.publish_time < window_end) {
                    fired = true;
                    break;
                }
            }
            report.trial_outcomes.push_back(fired == trial.expected);
            trial_start = window_end;
        }
        if (objectives.has_value() && objectives->validation.has_value()) {
            report.validation = decl::validate(*objectives, report.trial_outcomes);
        }
    }

    // Interface coverage.
    for (const ProcessSpec& spec : config.processes) {
        if (spec.kind == "nc_system") {
            const auto* nc = dynamic_cast<const NcProcess*>(sim.find_process(spec.name));
            report.interfaces.snn_config_pushes += nc->config_pushes();
            report.interfaces.input_spikes += nc->injected();
        } else if (spec.kind == "nsp") {
            auto* nsp_process = dynamic_cast<NspProcess*>(sim.find_process(spec.name));
            report.interfaces.output_spike_packets += nsp_process->event_packets();
            report.interfaces.objectives_applied |= nsp_process->objectives_applied();
            report.interfaces.notifications += nsp_process->proxy().notifications_emitted();
            report.unmapped_spikes += nsp_process->proxy().unmapped_spikes();
            const auto state = nsp_process->proxy().get_system_state();
            report.interfaces.system_state_neurons += state.neurons.size();
            report.interfaces.system_state_digest = snn::to_json_string(state);
            if (nsp_process->proxy().notifications_emitted() > 0) {
                report.interfaces.output_data_query =
                    "match Event { id, topic, count, snapshot->Snapshot depth 1 { id, time } }";
                const auto query = graph::GraphQuery::parse(report.interfaces.output_data_query);
                report.interfaces.output_data =
                    graph::result_to_json(nsp_process->proxy().serve_query(query, sim.now()));
            }
        }
    }
    if (report.interfaces.output_data.is_null()) {
        report.interfaces.output_data = ordered_json::array();
    }
    return report;
}

}  // namespace neuroproxy::harness
