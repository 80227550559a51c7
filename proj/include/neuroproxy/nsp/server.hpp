#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "neuroproxy/net/tcp.hpp"
#include "neuroproxy/nsp/proxy.hpp"

namespace neuroproxy::nsp {

/// Proxy instance file (JSON): instance id, listen endpoints, soft-state
/// defaults, offload sink.
struct ServerConfig {
    std::string instance_id = "nsp-0";
    std::uint16_t aer_port = 0;     // 0 = ephemeral
    std::uint16_t pubsub_port = 0;
    std::uint16_t query_port = 0;
    softstate::RefreshParams softstate_defaults{100 * kNsPerMs, 3};
    TimeNs snapshot_max_age = 1000 * kNsPerMs;
    std::string offload_sink;       // file path; empty = no offload
    std::string objectives_path;    // applied when a device connects; optional
};

ServerConfig load_server_config(const std::string& path);

/// Long-running NSP + broker against real sockets. One NC device speaks
/// AER on aer_port; pubsub clients exchange SUB/PUB/EVT lines on
/// pubsub_port; one query per line on query_port is answered with a JSON
/// document line. Logical time is nanoseconds since server start.
class ProxyServer {
public:
    explicit ProxyServer(ServerConfig config);
    ~ProxyServer();

    void start();
    void stop();

    std::uint16_t aer_port() const;
    std::uint16_t pubsub_port() const;
    std::uint16_t query_port() const;

    NspProxy& proxy() { return *proxy_; }
    pubsub::Broker& broker() { return broker_; }

    TimeNs now() const;

private:
    class SocketDeviceLink;

    void aer_loop();
    void pubsub_loop();
    void query_loop();
    void pubsub_session(net::TcpConnection connection, std::size_t session_id);
    void query_session(net::TcpConnection connection);
    void housekeeping_loop();

    ServerConfig config_;
    pubsub::Broker broker_;
    std::shared_ptr<SocketDeviceLink> link_;
    std::unique_ptr<NspProxy> proxy_;

    net::TcpListener aer_listener_;
    net::TcpListener pubsub_listener_;
    net::TcpListener query_listener_;

    std::atomic<bool> running_{false};
    std::vector<std::thread> threads_;
    std::mutex session_mutex_;
    std::vector<std::thread> sessions_;
    std::chrono::steady_clock::time_point epoch_;
};

}  // namespace neuroproxy::nsp
