#include "neuroproxy/nsp/device_link.hpp"

#include "neuroproxy/errors.hpp"
#include "neuroproxy/nsp/control.hpp"

namespace neuroproxy::nsp {

TransportDeviceLink::TransportDeviceLink(ControlTransport transport)
    : transport_(std::move(transport))
{
}

void TransportDeviceLink::push_config(const snn::SnnConfig& config)
{
    const auto bytes = aer::encode_packet(make_control_packet(ConfigPush{config}));
    transport_(bytes);
}

snn::TransientState TransportDeviceLink::request_transient()
{
    const auto request = aer::encode_packet(make_control_packet(SnapshotRequest{}));
    const auto reply_bytes = transport_(request);
    if (reply_bytes.empty()) {
        throw DeviceError("device returned no snapshot reply");
    }
    const auto decoded = aer::decode_packet(reply_bytes);
    const auto message = parse_control_packet(decoded.packet);
    const auto* reply = std::get_if<SnapshotReply>(&message);
    if (reply == nullptr) {
        throw DeviceError("device returned an unexpected control message");
    }
    return reply->state;
}

std::vector<std::uint8_t> handle_device_control(snn::NetworkInstance& instance,
                                                const std::vector<std::uint8_t>& request,
                                                TimeNs now, std::vector<SpikeEvent>* emitted)
{
    const auto decoded = aer::decode_packet(request);
    const auto message = parse_control_packet(decoded.packet);
    if (const auto* push = std::get_if<ConfigPush>(&message)) {
        instance.reconfigure(push->config);
        return {};
    }
    if (std::holds_alternative<SnapshotRequest>(message)) {
        if (now > instance.clock()) {
            auto spikes = instance.advance(now);
            if (emitted != nullptr) {
                emitted->insert(emitted->end(), spikes.begin(), spikes.end());
            }
        }
        return aer::encode_packet(make_control_packet(SnapshotReply{instance.snapshot_transient()}));
    }
    throw WireError("device cannot handle this control message", aer::kHeaderSize);
}

InProcessDeviceLink::InProcessDeviceLink(snn::NetworkInstance& instance,
                                         std::function<TimeNs()> now)
    : instance_(instance), now_(std::move(now))
{
}

void InProcessDeviceLink::push_config(const snn::SnnConfig& config)
{
    const auto bytes = aer::encode_packet(make_control_packet(ConfigPush{config}));
    handle_device_control(instance_, bytes, now_ ? now_() : instance_.clock());
}

snn::TransientState InProcessDeviceLink::request_transient()
{
    const auto request = aer::encode_packet(make_control_packet(SnapshotRequest{}));
    const auto reply = handle_device_control(instance_, request, now_ ? now_() : instance_.clock());
    const auto decoded = aer::decode_packet(reply);
    return std::get<SnapshotReply>(parse_control_packet(decoded.packet)).state;
}

}  // namespace neuroproxy::nsp
