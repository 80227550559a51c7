#pragma once

#include <variant>
#include <vector>

#include "neuroproxy/aer/wire.hpp"
#include "neuroproxy/snn/config.hpp"

namespace neuroproxy::nsp {

/// Control-plane messages carried as AER kind-0x02 payloads (JSON):
///   {"type":"config","config":{...}}      NSP -> device
///   {"type":"snapshot_request"}           NSP -> device
///   {"type":"snapshot","state":{...}}     device -> NSP
struct ConfigPush {
    snn::SnnConfig config;
};
struct SnapshotRequest {};
struct SnapshotReply {
    snn::TransientState state;
};

using ControlMessage = std::variant<ConfigPush, SnapshotRequest, SnapshotReply>;

aer::AerPacket make_control_packet(const ControlMessage& message);
ControlMessage parse_control_packet(const aer::AerPacket& packet);  // throws WireError

}  // namespace neuroproxy::nsp
