#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "neuroproxy/errors.hpp"
#include "neuroproxy/spike.hpp"

namespace neuroproxy::aer {

/// Canonical AER framing. Every packet, all integers little-endian:
///
///   magic   4 bytes  "AER0" (0x41 0x45 0x52 0x30)
///   kind    1 byte   0x01 spike events, 0x02 control payload
///   count   4 bytes  record count (kind 0x01) or payload bytes (kind 0x02)
///   body    count * 12 bytes of (address u32, timestamp u64), or count
///           payload bytes verbatim
enum class PacketKind : std::uint8_t {
    kEvents = 0x01,
    kControl = 0x02,
};

inline constexpr std::array<std::uint8_t, 4> kMagic{0x41, 0x45, 0x52, 0x30};
inline constexpr std::size_t kHeaderSize = 9;
inline constexpr std::size_t kEventRecordSize = 12;

struct AerPacket {
    PacketKind kind = PacketKind::kEvents;
    std::vector<SpikeEvent> events;        // kind == kEvents
    std::vector<std::uint8_t> payload;     // kind == kControl

    static AerPacket make_events(std::vector<SpikeEvent> events);
    static AerPacket make_control(std::vector<std::uint8_t> payload);

    friend bool operator==(const AerPacket&, const AerPacket&) = default;
};

/// Serializes a packet. Throws WireError if an event packet is not
/// non-decreasing in timestamp.
std::vector<std::uint8_t> encode_packet(const AerPacket& packet);

struct DecodedPacket {
    AerPacket packet;
    std::size_t consumed = 0;
};

/// Exact inverse of encode_packet. Throws WireError with the byte offset
/// on bad magic, unknown kind, truncation, or unsorted events.
DecodedPacket decode_packet(std::span<const std::uint8_t> bytes);

/// Incremental decoder for a packet stream arriving in arbitrary chunks.
/// Yields exactly the packets a whole-buffer decode of the concatenated
/// stream would yield.
class StreamDecoder {
public:
    void feed(std::span<const std::uint8_t> chunk);

    /// Next complete packet, or nullopt if more bytes are needed.
    /// Throws WireError (with the absolute stream offset) on corruption.
    std::optional<AerPacket> next();

    /// Bytes buffered but not yet consumed by next().
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::vector<std::uint8_t> buffer_;
    std::size_t stream_offset_ = 0;  // absolute offset of buffer_[0]
};

/// Lazy k-way merge of individually (timestamp, address)-ordered spike
/// streams into one globally (timestamp, address)-ordered stream. Stable:
/// ties are resolved in favour of the earlier stream.
class SpikeStreamMerger {
public:
    explicit SpikeStreamMerger(std::vector<std::span<const SpikeEvent>> streams);

    /// Pulls the next event. Throws MergeError naming the offending stream
    /// if an input turns out to be unordered.
    std::optional<SpikeEvent> next();

private:
    struct Cursor {
        std::span<const SpikeEvent> stream;
        std::size_t pos = 0;
    };
    std::vector<Cursor> cursors_;
};

/// Eager convenience wrapper around SpikeStreamMerger.
std::vector<SpikeEvent> merge_streams(const std::vector<std::vector<SpikeEvent>>& streams);

}  // namespace neuroproxy::aer
