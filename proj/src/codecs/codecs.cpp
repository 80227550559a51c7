#include "neuroproxy/codecs/codecs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace neuroproxy::codecs {

namespace {

BigInt int_pow(BigInt base, std::uint32_t exp)
{
    BigInt result = 1;
    while (exp > 0) {
        if (exp & 1u) {
            result *= base;
        }
        base *= base;
        exp >>= 1u;
    }
    return result;
}

BigInt factorial(std::uint32_t n)
{
    BigInt result = 1;
    for (std::uint32_t i = 2; i <= n; ++i) {
        result *= i;
    }
    return result;
}

/// Most-significant-first base-`radix` digits of `symbol`, width `count`.
std::vector<std::uint32_t> to_digits(BigInt symbol, std::uint32_t radix, std::uint32_t count)
{
    std::vector<std::uint32_t> digits(count, 0);
    for (std::uint32_t i = count; i-- > 0;) {
        digits[i] = static_cast<std::uint32_t>(symbol % radix);
        symbol /= radix;
    }
    return digits;
}

BigInt from_digits(std::span<const std::uint32_t> digits, std::uint32_t radix)
{
    BigInt symbol = 0;
    for (std::uint32_t d : digits) {
        symbol = symbol * radix + d;
    }
    return symbol;
}

/// Lehmer decode: index in [0, n!) -> permutation of {0..n-1}.
std::vector<std::uint32_t> permutation_from_index(BigInt index, std::uint32_t n)
{
    std::vector<std::uint32_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0u);
    std::vector<std::uint32_t> perm;
    perm.reserve(n);
    for (std::uint32_t i = n; i > 0; --i) {
        const BigInt f = factorial(i - 1);
        const auto pick = static_cast<std::size_t>(index / f);
        index %= f;
        perm.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return perm;
}

BigInt index_from_permutation(std::span<const std::uint32_t> perm)
{
    const auto n = static_cast<std::uint32_t>(perm.size());
    BigInt index = 0;
    std::vector<std::uint32_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0u);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto it = std::find(remaining.begin(), remaining.end(), perm[i]);
        const auto pos = static_cast<std::uint32_t>(it - remaining.begin());
        index += BigInt(pos) * factorial(n - i - 1);
        remaining.erase(it);
    }
    return index;
}

struct WindowedTrain {
    // Per neuron offset-from-base -> spike times (relative to window start).
    std::map<std::uint32_t, std::vector<TimeNs>> by_neuron;
    std::size_t total = 0;
};

WindowedTrain collect_train(std::span<const SpikeEvent> events, const CodecParams& params,
                            TimeNs window_start)
{
    WindowedTrain train;
    const TimeNs window = params.window_ns();
    for (const SpikeEvent& e : events) {
        if (e.address < params.base_address ||
            e.address >= params.base_address + params.neuron_count) {
            throw CodecError("spike address " + std::to_string(e.address) +
                             " outside the population");
        }
        if (e.timestamp < window_start || e.timestamp >= window_start + window) {
            throw CodecError("spike at " + std::to_string(e.timestamp) +
                             " ns outside the window");
        }
        train.by_neuron[e.address - params.base_address].push_back(e.timestamp - window_start);
        ++train.total;
    }
    return train;
}

void require_single_spikes(const WindowedTrain& train)
{
    for (const auto& [neuron, times] : train.by_neuron) {
        if (times.size() > 1) {
            throw CodecError("neuron " + std::to_string(neuron) +
                             " spikes more than once where a single spike is required");
        }
    }
}

}  // namespace

const char* scheme_name(CodingScheme scheme)
{
    switch (scheme) {
        case CodingScheme::kRate: return "rate";
        case CodingScheme::kCount: return "count";
        case CodingScheme::kTiming: return "timing";
        case CodingScheme::kRankOrder: return "rank_order";
        case CodingScheme::kSynchrony: return "synchrony";
        case CodingScheme::kBinaryReference: return "binary";
    }
    return "?";
}

CodingScheme scheme_from_name(std::string_view name)
{
    if (name == "rate") return CodingScheme::kRate;
    if (name == "count") return CodingScheme::kCount;
    if (name == "timing") return CodingScheme::kTiming;
    if (name == "rank_order" || name == "rank-order") return CodingScheme::kRankOrder;
    if (name == "synchrony") return CodingScheme::kSynchrony;
    if (name == "binary" || name == "binary_reference") return CodingScheme::kBinaryReference;
    throw CodecError("unknown coding scheme: " + std::string(name));
}

std::uint32_t CodecParams::bin_count() const
{
    validate();
    const double ratio = window_ms / resolution_ms;
    const auto bins = static_cast<std::uint32_t>(std::llround(ratio));
    if (bins == 0 || std::abs(ratio - static_cast<double>(bins)) > 1e-9) {
        throw CodecError("window is not an integral number of bins (t=" +
                         std::to_string(window_ms) + " ms, dt=" + std::to_string(resolution_ms) +
                         " ms)");
    }
    return bins;
}

void CodecParams::validate() const
{
    if (neuron_count < 1) {
        throw CodecError("neuron count must be at least 1");
    }
    if (resolution_ms <= 0.0 || window_ms < resolution_ms) {
        throw CodecError("window/resolution must satisfy t >= dt > 0");
    }
    if (phase_count < 1) {
        throw CodecError("phase count must be at least 1");
    }
}

BigInt capacity_states(CodingScheme scheme, const CodecParams& params)
{
    params.validate();
    switch (scheme) {
        case CodingScheme::kTiming:
            return int_pow(params.bin_count(), params.neuron_count);
        case CodingScheme::kRankOrder:
            return factorial(params.neuron_count);
        case CodingScheme::kSynchrony:
            return int_pow(params.phase_count, params.neuron_count);
        case CodingScheme::kBinaryReference:
            return int_pow(2, params.neuron_count);
        case CodingScheme::kCount:
        case CodingScheme::kRate:
            return BigInt(params.neuron_count) + 1;
    }
    throw CodecError("unknown coding scheme");
}

double equivalent_bits(const BigInt& states)
{
    if (states < 1) {
        throw CodecError("state count must be >= 1");
    }
    const auto bit_length = boost::multiprecision::msb(states);  // floor(log2)
    if (bit_length <= 62) {
        return std::log2(states.convert_to<double>());
    }
    // log2(s) = (L - 63) + log2(top 64 bits), exact enough for >= 12
    // significant digits.
    const BigInt top = states >> (bit_length - 63);
    return static_cast<double>(bit_length - 63) + std::log2(top.convert_to<double>());
}

std::vector<SpikeEvent> encode(CodingScheme scheme, const BigInt& symbol,
                               const CodecParams& params, TimeNs window_start)
{
    params.validate();
    if (symbol < 0 || symbol >= capacity_states(scheme, params)) {
        throw CodecError("symbol out of range for scheme " + std::string(scheme_name(scheme)));
    }
    const std::uint32_t n = params.neuron_count;
    const TimeNs window = params.window_ns();
    std::vector<SpikeEvent> events;
    switch (scheme) {
        case CodingScheme::kCount: {
            const auto k = symbol.convert_to<std::uint32_t>();
            for (std::uint32_t i = 0; i < k; ++i) {
                events.push_back({params.base_address + i, window_start});
            }
            break;
        }
        case CodingScheme::kRate: {
            // Beyond the one-spike regime the rate symbol is carried by a
            // single designated neuron as k evenly spaced spikes.
            const auto k = symbol.convert_to<std::uint64_t>();
            for (std::uint64_t i = 0; i < k; ++i) {
                events.push_back({params.base_address, window_start + i * (window / k)});
            }
            break;
        }
        case CodingScheme::kTiming: {
            const std::uint32_t bins = params.bin_count();
            const auto digits = to_digits(symbol, bins, n);
            for (std::uint32_t i = 0; i < n; ++i) {
                events.push_back(
                    {params.base_address + i, window_start + digits[i] * params.resolution_ns()});
            }
            break;
        }
        case CodingScheme::kSynchrony: {
            const auto digits = to_digits(symbol, params.phase_count, n);
            for (std::uint32_t i = 0; i < n; ++i) {
                const TimeNs phase_time = static_cast<TimeNs>(digits[i]) * window / params.phase_count;
                events.push_back({params.base_address + i, window_start + phase_time});
            }
            break;
        }
        case CodingScheme::kRankOrder: {
            if (n > params.bin_count()) {
                throw CodecError("rank-order encoding needs at least N bins in the window");
            }
            const auto perm = permutation_from_index(symbol, n);
            for (std::uint32_t rank = 0; rank < n; ++rank) {
                events.push_back({params.base_address + perm[rank],
                                  window_start + rank * params.resolution_ns()});
            }
            break;
        }
        case CodingScheme::kBinaryReference:
            throw CodecError("binary reference scheme supports capacity calculation only");
    }
    std::sort(events.begin(), events.end());
    return events;
}

BigInt decode(CodingScheme scheme, std::span<const SpikeEvent> events, const CodecParams& params,
              TimeNs window_start)
{
    params.validate();
    const std::uint32_t n = params.neuron_count;
    WindowedTrain train = collect_train(events, params, window_start);
    switch (scheme) {
        case CodingScheme::kCount: {
            require_single_spikes(train);
            return BigInt(train.total);
        }
        case CodingScheme::kRate: {
            for (const auto& [neuron, times] : train.by_neuron) {
                if (neuron != 0) {
                    throw CodecError("rate train must use the designated neuron only");
                }
            }
            if (train.total > n) {
                throw CodecError("rate train exceeds the symbol range");
            }
            return BigInt(train.total);
        }
        case CodingScheme::kTiming: {
            require_single_spikes(train);
            if (train.by_neuron.size() != n) {
                throw CodecError("timing train must contain exactly one spike per neuron");
            }
            std::vector<std::uint32_t> digits(n, 0);
            const std::uint32_t bins = params.bin_count();
            for (const auto& [neuron, times] : train.by_neuron) {
                const auto bin = static_cast<std::uint32_t>(times[0] / params.resolution_ns());
                if (bin >= bins) {
                    throw CodecError("timing spike beyond the last bin");
                }
                digits[neuron] = bin;
            }
            return from_digits(digits, bins);
        }
        case CodingScheme::kSynchrony: {
            require_single_spikes(train);
            if (train.by_neuron.size() != n) {
                throw CodecError("synchrony train must contain exactly one spike per neuron");
            }
            const TimeNs window = params.window_ns();
            std::vector<std::uint32_t> digits(n, 0);
            for (const auto& [neuron, times] : train.by_neuron) {
                // Nearest phase slot; exact for encoder-placed spikes.
                const std::uint64_t numer = times[0] * params.phase_count + window / 2;
                auto phase = static_cast<std::uint32_t>(numer / window);
                if (phase >= params.phase_count) {
                    phase = params.phase_count - 1;
                }
                digits[neuron] = phase;
            }
            return from_digits(digits, params.phase_count);
        }
        case CodingScheme::kRankOrder: {
            require_single_spikes(train);
            if (train.by_neuron.size() != n) {
                throw CodecError("rank-order train must contain exactly one spike per neuron");
            }
            std::vector<std::pair<TimeNs, std::uint32_t>> order;
            order.reserve(n);
            for (const auto& [neuron, times] : train.by_neuron) {
                order.emplace_back(times[0], neuron);
            }
            std::sort(order.begin(), order.end());
            for (std::size_t i = 1; i < order.size(); ++i) {
                if (order[i].first == order[i - 1].first) {
                    throw CodecError("rank-order train has simultaneous spikes (ambiguous order)");
                }
            }
            std::vector<std::uint32_t> perm;
            perm.reserve(n);
            for (const auto& [time, neuron] : order) {
                perm.push_back(neuron);
            }
            return index_from_permutation(perm);
        }
        case CodingScheme::kBinaryReference:
            throw CodecError("binary reference scheme supports capacity calculation only");
    }
    throw CodecError("unknown coding scheme");
}

LebesgueEncoder::LebesgueEncoder(double delta, std::uint32_t up_address,
                                 std::uint32_t down_address)
    : delta_(delta), up_address_(up_address), down_address_(down_address)
{
    if (delta <= 0.0) {
        throw CodecError("lebesgue delta must be positive");
    }
}

std::vector<SpikeEvent> LebesgueEncoder::push(const Sample& sample)
{
    std::vector<SpikeEvent> events;
    if (!primed_) {
        primed_ = true;
        reference_ = sample.value;
        return events;
    }
    while (sample.value >= reference_ + delta_) {
        events.push_back({up_address_, sample.time});
        reference_ += delta_;
    }
    while (sample.value <= reference_ - delta_) {
        events.push_back({down_address_, sample.time});
        reference_ -= delta_;
    }
    return events;
}

std::vector<SpikeEvent> lebesgue_encode(std::span<const Sample> samples, double delta,
                                        std::uint32_t up_address, std::uint32_t down_address)
{
    LebesgueEncoder encoder(delta, up_address, down_address);
    std::vector<SpikeEvent> out;
    TimeNs prev = 0;
    bool first = true;
    for (const Sample& s : samples) {
        if (!first && s.time < prev) {
            throw CodecError("samples must be time-ordered");
        }
        prev = s.time;
        first = false;
        auto events = encoder.push(s);
        out.insert(out.end(), events.begin(), events.end());
    }
    return out;
}

}  // namespace neuroproxy::codecs
