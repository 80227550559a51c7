#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neuroproxy/spike.hpp"

namespace neuroproxy::harness {

/// One validation trial: a spike bundle (offsets relative to the trial
/// start) or a codec symbol, the expected outcome (should a notification
/// fire?), and the isolation spacing to the next trial.
struct TrialSpec {
    std::vector<SpikeEvent> spikes;       // timestamps are offsets
    std::optional<std::uint64_t> symbol;  // alternative to spikes
    bool expected = true;
    TimeNs spacing = 50 * kNsPerMs;

    friend bool operator==(const TrialSpec&, const TrialSpec&) = default;
};

struct TrialDataset {
    std::vector<TrialSpec> trials;

    friend bool operator==(const TrialDataset&, const TrialDataset&) = default;
};

TrialDataset load_dataset(const std::string& path);
TrialDataset dataset_from_json_text(const std::string& text);

}  // namespace neuroproxy::harness
