#include "neuroproxy/snn/config.hpp"

#include <unordered_set>

#include <json.hpp>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::snn {

using nlohmann::ordered_json;

void SnnConfig::validate() const
{
    std::unordered_set<std::uint32_t> ids;
    for (const NeuronParams& n : neurons) {
        if (!ids.insert(n.id).second) {
            throw ConfigError("duplicate neuron id " + std::to_string(n.id));
        }
        if (n.tau_mem_ms <= 0.0) {
            throw ConfigError("neuron " + std::to_string(n.id) + " has nonpositive tau_mem");
        }
        if (n.refractory_ms < 0.0) {
            throw ConfigError("neuron " + std::to_string(n.id) + " has negative refractory");
        }
    }
    for (const SynapseParams& s : synapses) {
        const std::string name =
            "synapse " + std::to_string(s.src) + "->" + std::to_string(s.dst);
        if (!ids.contains(s.src) && !input_addresses.contains(s.src)) {
            throw ConfigError(name + " has dangling source");
        }
        if (!ids.contains(s.dst)) {
            throw ConfigError(name + " has dangling destination");
        }
        if (s.delay_ms <= 0.0) {
            throw ConfigError(name + " has nonpositive delay");
        }
    }
    for (std::uint32_t r : readout_ids) {
        if (!ids.contains(r)) {
            throw ConfigError("readout id " + std::to_string(r) + " is not a neuron");
        }
    }
}

std::string to_json_string(const SnnConfig& config)
{
    ordered_json doc;
    doc["neurons"] = ordered_json::array();
    for (const NeuronParams& n : config.neurons) {
        ordered_json j;
        j["id"] = n.id;
        j["threshold"] = n.threshold;
        j["tau_mem_ms"] = n.tau_mem_ms;
        j["v_reset"] = n.v_reset;
        j["refractory_ms"] = n.refractory_ms;
        doc["neurons"].push_back(std::move(j));
    }
    doc["synapses"] = ordered_json::array();
    for (const SynapseParams& s : config.synapses) {
        ordered_json j;
        j["src"] = s.src;
        j["dst"] = s.dst;
        j["weight"] = s.weight;
        j["delay_ms"] = s.delay_ms;
        doc["synapses"].push_back(std::move(j));
    }
    doc["input_addresses"] = config.input_addresses;
    doc["readout_ids"] = config.readout_ids;
    return doc.dump();
}

SnnConfig config_from_json(const std::string& text)
{
    const auto doc = nlohmann::json::parse(text);
    SnnConfig config;
    for (const auto& j : doc.at("neurons")) {
        NeuronParams n;
        n.id = j.at("id").get<std::uint32_t>();
        n.threshold = j.at("threshold").get<double>();
        n.tau_mem_ms = j.at("tau_mem_ms").get<double>();
        n.v_reset = j.at("v_reset").get<double>();
        n.refractory_ms = j.at("refractory_ms").get<double>();
        config.neurons.push_back(n);
    }
    for (const auto& j : doc.at("synapses")) {
        SynapseParams s;
        s.src = j.at("src").get<std::uint32_t>();
        s.dst = j.at("dst").get<std::uint32_t>();
        s.weight = j.at("weight").get<double>();
        s.delay_ms = j.at("delay_ms").get<double>();
        config.synapses.push_back(s);
    }
    for (const auto& a : doc.at("input_addresses")) {
        config.input_addresses.insert(a.get<std::uint32_t>());
    }
    for (const auto& r : doc.at("readout_ids")) {
        config.readout_ids.insert(r.get<std::uint32_t>());
    }
    return config;
}

std::string to_json_string(const TransientState& state)
{
    ordered_json doc;
    doc["clock"] = state.clock;
    doc["neurons"] = ordered_json::array();
    for (const NeuronTransient& n : state.neurons) {
        ordered_json j;
        j["id"] = n.id;
        j["potential"] = n.potential;
        j["last_update"] = n.last_update;
        j["refractory_until"] = n.refractory_until;
        doc["neurons"].push_back(std::move(j));
    }
    doc["pending"] = ordered_json::array();
    for (const PendingDelivery& p : state.pending) {
        ordered_json j;
        j["time"] = p.time;
        j["dst"] = p.dst;
        j["src"] = p.src;
        j["weight"] = p.weight;
        doc["pending"].push_back(std::move(j));
    }
    return doc.dump();
}

TransientState transient_from_json(const std::string& text)
{
    const auto doc = nlohmann::json::parse(text);
    TransientState state;
    state.clock = doc.at("clock").get<TimeNs>();
    for (const auto& j : doc.at("neurons")) {
        NeuronTransient n;
        n.id = j.at("id").get<std::uint32_t>();
        n.potential = j.at("potential").get<double>();
        n.last_update = j.at("last_update").get<TimeNs>();
        n.refractory_until = j.at("refractory_until").get<TimeNs>();
        state.neurons.push_back(n);
    }
    for (const auto& j : doc.at("pending")) {
        PendingDelivery p;
        p.time = j.at("time").get<TimeNs>();
        p.dst = j.at("dst").get<std::uint32_t>();
        p.src = j.at("src").get<std::uint32_t>();
        p.weight = j.at("weight").get<double>();
        state.pending.push_back(p);
    }
    return state;
}

}  // namespace neuroproxy::snn
