#include "neuroproxy/aer/wire.hpp"

#include <algorithm>
#include <cstring>

namespace neuroproxy::aer {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at)
{
    return static_cast<std::uint32_t>(in[at]) |
           static_cast<std::uint32_t>(in[at + 1]) << 8 |
           static_cast<std::uint32_t>(in[at + 2]) << 16 |
           static_cast<std::uint32_t>(in[at + 3]) << 24;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = v << 8 | in[at + static_cast<std::size_t>(i)];
    }
    return v;
}

bool events_sorted(std::span<const SpikeEvent> events)
{
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].timestamp < events[i - 1].timestamp) {
            return false;
        }
    }
    return true;
}

/// Header size needed by decode_packet before the body length is known.
struct Header {
    PacketKind kind;
    std::uint32_t count;
    std::size_t body_size;
};

Header decode_header(std::span<const std::uint8_t> bytes, std::size_t base_offset)
{
    if (bytes.size() < kMagic.size()) {
        throw WireError("truncated packet header", base_offset + bytes.size());
    }
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
        if (bytes[i] != kMagic[i]) {
            throw WireError("bad magic", base_offset + i);
        }
    }
    if (bytes.size() < kHeaderSize) {
        throw WireError("truncated packet header", base_offset + bytes.size());
    }
    const std::uint8_t kind_byte = bytes[4];
    if (kind_byte != static_cast<std::uint8_t>(PacketKind::kEvents) &&
        kind_byte != static_cast<std::uint8_t>(PacketKind::kControl)) {
        throw WireError("unknown packet kind", base_offset + 4);
    }
    const auto kind = static_cast<PacketKind>(kind_byte);
    const std::uint32_t count = get_u32(bytes, 5);
    const std::size_t body =
        kind == PacketKind::kEvents ? static_cast<std::size_t>(count) * kEventRecordSize
                                    : static_cast<std::size_t>(count);
    return Header{kind, count, body};
}

}  // namespace

AerPacket AerPacket::make_events(std::vector<SpikeEvent> events)
{
    AerPacket p;
    p.kind = PacketKind::kEvents;
    p.events = std::move(events);
    return p;
}

AerPacket AerPacket::make_control(std::vector<std::uint8_t> payload)
{
    AerPacket p;
    p.kind = PacketKind::kControl;
    p.payload = std::move(payload);
    return p;
}

std::vector<std::uint8_t> encode_packet(const AerPacket& packet)
{
    std::vector<std::uint8_t> out;
    if (packet.kind == PacketKind::kEvents) {
        if (!events_sorted(packet.events)) {
            throw WireError("events not ordered by timestamp", 0);
        }
        out.reserve(kHeaderSize + packet.events.size() * kEventRecordSize);
        out.insert(out.end(), kMagic.begin(), kMagic.end());
        out.push_back(static_cast<std::uint8_t>(packet.kind));
        put_u32(out, static_cast<std::uint32_t>(packet.events.size()));
        for (const SpikeEvent& e : packet.events) {
            put_u32(out, e.address);
            put_u64(out, e.timestamp);
        }
    } else {
        out.reserve(kHeaderSize + packet.payload.size());
        out.insert(out.end(), kMagic.begin(), kMagic.end());
        out.push_back(static_cast<std::uint8_t>(packet.kind));
        put_u32(out, static_cast<std::uint32_t>(packet.payload.size()));
        out.insert(out.end(), packet.payload.begin(), packet.payload.end());
    }
    return out;
}

DecodedPacket decode_packet(std::span<const std::uint8_t> bytes)
{
    const Header h = decode_header(bytes, 0);
    if (bytes.size() < kHeaderSize + h.body_size) {
        throw WireError("truncated packet body", bytes.size());
    }
    DecodedPacket result;
    result.packet.kind = h.kind;
    result.consumed = kHeaderSize + h.body_size;
    if (h.kind == PacketKind::kEvents) {
        result.packet.events.reserve(h.count);
        TimeNs prev = 0;
        for (std::uint32_t i = 0; i < h.count; ++i) {
            const std::size_t at = kHeaderSize + static_cast<std::size_t>(i) * kEventRecordSize;
            SpikeEvent e;
            e.address = get_u32(bytes, at);
            e.timestamp = get_u64(bytes, at + 4);
            if (i > 0 && e.timestamp < prev) {
                throw WireError("decoded events not ordered by timestamp", at + 4);
            }
            prev = e.timestamp;
            result.packet.events.push_back(e);
        }
    } else {
        result.packet.payload.assign(bytes.begin() + kHeaderSize,
                                     bytes.begin() + static_cast<std::ptrdiff_t>(result.consumed));
    }
    return result;
}

void StreamDecoder::feed(std::span<const std::uint8_t> chunk)
{
    buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
}

std::optional<AerPacket> StreamDecoder::next()
{
    if (buffer_.size() < kHeaderSize) {
        // Validate whatever magic prefix we already have so corruption is
        // reported as soon as it can be detected.
        for (std::size_t i = 0; i < std::min(buffer_.size(), kMagic.size()); ++i) {
            if (buffer_[i] != kMagic[i]) {
                throw WireError("bad magic", stream_offset_ + i);
            }
        }
        return std::nullopt;
    }
    const Header h = decode_header(buffer_, stream_offset_);
    const std::size_t total = kHeaderSize + h.body_size;
    if (buffer_.size() < total) {
        return std::nullopt;
    }
    DecodedPacket decoded = decode_packet(std::span(buffer_.data(), total));
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(total));
    stream_offset_ += total;
    return std::move(decoded.packet);
}

SpikeStreamMerger::SpikeStreamMerger(std::vector<std::span<const SpikeEvent>> streams)
{
    cursors_.reserve(streams.size());
    for (auto s : streams) {
        cursors_.push_back(Cursor{s, 0});
    }
}

std::optional<SpikeEvent> SpikeStreamMerger::next()
{
    std::size_t best = cursors_.size();
    for (std::size_t i = 0; i < cursors_.size(); ++i) {
        const Cursor& c = cursors_[i];
        if (c.pos >= c.stream.size()) {
            continue;
        }
        if (c.pos > 0 && c.stream[c.pos] < c.stream[c.pos - 1]) {
            throw MergeError("stream " + std::to_string(i) + " unordered at position " +
                                 std::to_string(c.pos),
                             i);
        }
        if (best == cursors_.size() || c.stream[c.pos] < cursors_[best].stream[cursors_[best].pos]) {
            best = i;
        }
    }
    if (best == cursors_.size()) {
        return std::nullopt;
    }
    return cursors_[best].stream[cursors_[best].pos++];
}

std::vector<SpikeEvent> merge_streams(const std::vector<std::vector<SpikeEvent>>& streams)
{
    std::vector<std::span<const SpikeEvent>> spans;
    spans.reserve(streams.size());
    std::size_t total = 0;
    for (const auto& s : streams) {
        spans.emplace_back(s.data(), s.size());
        total += s.size();
    }
    SpikeStreamMerger merger(std::move(spans));
    std::vector<SpikeEvent> out;
    out.reserve(total);
    while (auto e = merger.next()) {
        out.push_back(*e);
    }
    return out;
}

}  // namespace neuroproxy::aer
