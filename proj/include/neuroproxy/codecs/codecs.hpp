#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "neuroproxy/errors.hpp"
#include "neuroproxy/spike.hpp"

namespace neuroproxy::codecs {

using BigInt = boost::multiprecision::cpp_int;

/// Neural coding schemes. binary_reference is the von Neumann comparison
/// row: it supports capacity calculation only, not spike encoding.
enum class CodingScheme {
    kRate,
    kCount,
    kTiming,
    kRankOrder,
    kSynchrony,
    kBinaryReference,
};

const char* scheme_name(CodingScheme scheme);
CodingScheme scheme_from_name(std::string_view name);

struct CodecParams {
    std::uint32_t neuron_count = 1;   // N
    double window_ms = 10.0;          // t
    double resolution_ms = 1.0;       // delta t
    std::uint32_t phase_count = 1;    // n_phi (synchrony)
    std::uint32_t base_address = 0;   // address of the first neuron

    /// Number of temporal bins B = t / delta t. Throws CodecError when the
    /// window is not an integral number of bins.
    std::uint32_t bin_count() const;

    TimeNs window_ns() const { return ns_from_ms(window_ms); }
    TimeNs resolution_ns() const { return ns_from_ms(resolution_ms); }

    void validate() const;
};

/// Number of distinguishable states in the one-spike-per-neuron regime:
/// timing B^N, rank order N!, synchrony n_phi^N, binary 2^N, count N+1,
/// rate N+1 (equivalent to count in this regime).
BigInt capacity_states(CodingScheme scheme, const CodecParams& params);

/// log2 of an exact state count, accurate to at least 12 significant
/// digits for arbitrarily large inputs. Throws CodecError for states < 1.
double equivalent_bits(const BigInt& states);

/// Maps a symbol to a spike train inside the window [t0, t0 + t).
/// The symbol must be below capacity_states(scheme, params).
std::vector<SpikeEvent> encode(CodingScheme scheme, const BigInt& symbol,
                               const CodecParams& params, TimeNs window_start);

/// Inverse of encode over a single window. Throws CodecError describing
/// the violated rule for malformed trains.
BigInt decode(CodingScheme scheme, std::span<const SpikeEvent> events,
              const CodecParams& params, TimeNs window_start);

struct Sample {
    TimeNs time = 0;
    double value = 0.0;
};

/// Stateful level-crossing (Lebesgue) encoder. The reference level is
/// initialized to the first sample value; each crossing of +/- delta emits
/// an UP or DOWN event and moves the reference by delta.
class LebesgueEncoder {
public:
    LebesgueEncoder(double delta, std::uint32_t up_address, std::uint32_t down_address);

    std::vector<SpikeEvent> push(const Sample& sample);

private:
    double delta_;
    std::uint32_t up_address_;
    std::uint32_t down_address_;
    bool primed_ = false;
    double reference_ = 0.0;
};

/// One-shot Lebesgue encoding of a time-ordered sample sequence.
std::vector<SpikeEvent> lebesgue_encode(std::span<const Sample> samples, double delta,
                                        std::uint32_t up_address, std::uint32_t down_address);

}  // namespace neuroproxy::codecs
