#include "neuroproxy/harness/dataset.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::harness {

TrialDataset dataset_from_json_text(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("bad dataset JSON: ") + e.what());
    }
    TrialDataset dataset;
    for (const auto& jt : doc.at("trials")) {
        TrialSpec trial;
        trial.expected = jt.at("expected").get<bool>();
        trial.spacing = ns_from_ms(jt.value("spacing_ms", 50.0));
        if (jt.contains("symbol")) {
            trial.symbol = jt.at("symbol").get<std::uint64_t>();
        }
        if (jt.contains("spikes")) {
            for (const auto& js : jt.at("spikes")) {
                SpikeEvent e;
                e.address = js.at("address").get<std::uint32_t>();
                e.timestamp = ns_from_ms(js.at("offset_ms").get<double>());
                trial.spikes.push_back(e);
            }
            std::sort(trial.spikes.begin(), trial.spikes.end());
        }
        if (!trial.symbol.has_value() && trial.spikes.empty() && trial.expected) {
            throw ScenarioError("a trial expecting a notification needs spikes or a symbol");
        }
        dataset.trials.push_back(std::move(trial));
    }
    if (dataset.trials.empty()) {
        throw ScenarioError("dataset has no trials");
    }
    return dataset;
}

TrialDataset load_dataset(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open dataset: " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return dataset_from_json_text(text);
}

}  // namespace neuroproxy::harness
