#include "neuroproxy/nsp/control.hpp"

#include <json.hpp>

namespace neuroproxy::nsp {

using nlohmann::ordered_json;

aer::AerPacket make_control_packet(const ControlMessage& message)
{
    ordered_json doc;
    if (const auto* push = std::get_if<ConfigPush>(&message)) {
        doc["type"] = "config";
        doc["config"] = nlohmann::ordered_json::parse(snn::to_json_string(push->config));
    } else if (std::holds_alternative<SnapshotRequest>(message)) {
        doc["type"] = "snapshot_request";
    } else {
        doc["type"] = "snapshot";
        doc["state"] = nlohmann::ordered_json::parse(
            snn::to_json_string(std::get<SnapshotReply>(message).state));
    }
    const std::string text = doc.dump();
    return aer::AerPacket::make_control(std::vector<std::uint8_t>(text.begin(), text.end()));
}

ControlMessage parse_control_packet(const aer::AerPacket& packet)
{
    if (packet.kind != aer::PacketKind::kControl) {
        throw WireError("control message expected a kind-0x02 packet", 4);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(packet.payload.begin(), packet.payload.end());
    } catch (const nlohmann::json::exception& e) {
        throw WireError(std::string("control payload is not valid JSON: ") + e.what(),
                        aer::kHeaderSize);
    }
    const std::string type = doc.value("type", "");
    if (type == "config") {
        return ConfigPush{snn::config_from_json(doc.at("config").dump())};
    }
    if (type == "snapshot_request") {
        return SnapshotRequest{};
    }
    if (type == "snapshot") {
        return SnapshotReply{snn::transient_from_json(doc.at("state").dump())};
    }
    throw WireError("unknown control message type '" + type + "'", aer::kHeaderSize);
}

}  // namespace neuroproxy::nsp
