#pragma once

#include <functional>
#include <memory>

#include "neuroproxy/snn/config.hpp"
#include "neuroproxy/snn/network.hpp"

namespace neuroproxy::nsp {

/// Control channel from a proxy to its NC system. All traffic crosses the
/// AER wire format even for in-process devices.
class DeviceLink {
public:
    virtual ~DeviceLink() = default;

    /// Pushes a structural configuration. Throws DeviceError when the
    /// device is unreachable (the caller keeps its previous state).
    virtual void push_config(const snn::SnnConfig& config) = 0;

    /// Requests a transient snapshot at the device's current clock.
    virtual snn::TransientState request_transient() = 0;
};

/// Byte-level transport a link needs: send a control frame, and for
/// request/response exchanges receive the reply frame.
using ControlTransport = std::function<std::vector<std::uint8_t>(const std::vector<std::uint8_t>&)>;

/// Link that encodes every message to AER bytes and hands them to a
/// transport callback (in-process pipe, DES channel head, or socket).
class TransportDeviceLink : public DeviceLink {
public:
    explicit TransportDeviceLink(ControlTransport transport);

    void push_config(const snn::SnnConfig& config) override;
    snn::TransientState request_transient() override;

private:
    ControlTransport transport_;
};

/// Device-side handler: decodes control bytes, applies them to a network
/// instance, and encodes the reply (empty for one-way messages). Advances
/// the instance to `now` before a snapshot so decays are materialized;
/// readout spikes produced by that advance are appended to `emitted` when
/// given.
std::vector<std::uint8_t> handle_device_control(snn::NetworkInstance& instance,
                                                const std::vector<std::uint8_t>& request,
                                                TimeNs now,
                                                std::vector<SpikeEvent>* emitted = nullptr);

/// In-process link wrapping a simulator instance directly; the byte round
/// trip still goes through encode/decode.
class InProcessDeviceLink : public DeviceLink {
public:
    /// `now` supplies the logical time at which snapshots are taken.
    InProcessDeviceLink(snn::NetworkInstance& instance, std::function<TimeNs()> now);

    void push_config(const snn::SnnConfig& config) override;
    snn::TransientState request_transient() override;

private:
    snn::NetworkInstance& instance_;
    std::function<TimeNs()> now_;
};

}  // namespace neuroproxy::nsp
