#include "neuroproxy/nsp/server.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "neuroproxy/log.hpp"
#include "neuroproxy/nsp/control.hpp"
#include "neuroproxy/pubsub/wire.hpp"

namespace neuroproxy::nsp {

using namespace std::chrono_literals;

ServerConfig load_server_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open proxy config: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad proxy config " + path + ": " + e.what());
    }
    ServerConfig config;
    config.instance_id = doc.value("instance_id", config.instance_id);
    config.aer_port = doc.value("aer_port", 0);
    config.pubsub_port = doc.value("pubsub_port", 0);
    config.query_port = doc.value("query_port", 0);
    if (doc.contains("softstate")) {
        const auto& ss = doc.at("softstate");
        config.softstate_defaults.refresh_interval =
            ns_from_ms(ss.value("refresh_interval_ms", 100.0));
        config.softstate_defaults.miss_threshold = ss.value("miss_threshold", 3u);
    }
    config.snapshot_max_age = ns_from_ms(doc.value("snapshot_max_age_ms", 1000.0));
    config.offload_sink = doc.value("offload_sink", "");
    config.objectives_path = doc.value("objectives", "");
    return config;
}

/// Device link over the accepted AER connection. Snapshot replies are
/// matched to requests through a single-slot rendezvous; the NC protocol
/// has one outstanding snapshot request at a time.
class ProxyServer::SocketDeviceLink : public DeviceLink {
public:
    void attach(net::TcpConnection* connection)
    {
        std::lock_guard lock(mutex_);
        connection_ = connection;
    }

    void push_config(const snn::SnnConfig& config) override
    {
        std::lock_guard lock(mutex_);
        if (connection_ == nullptr) {
            throw DeviceError("NC device is not connected");
        }
        const auto bytes = aer::encode_packet(make_control_packet(ConfigPush{config}));
        connection_->send_all(bytes.data(), bytes.size());
    }

    snn::TransientState request_transient() override
    {
        std::unique_lock lock(mutex_);
        if (connection_ == nullptr) {
            throw DeviceError("NC device is not connected");
        }
        reply_.reset();
        const auto bytes = aer::encode_packet(make_control_packet(SnapshotRequest{}));
        connection_->send_all(bytes.data(), bytes.size());
        if (!reply_cv_.wait_for(lock, 2s, [this] { return reply_.has_value(); })) {
            throw DeviceError("snapshot request timed out");
        }
        return *reply_;
    }

    void deliver_reply(snn::TransientState state)
    {
        {
            std::lock_guard lock(mutex_);
            reply_ = std::move(state);
        }
        reply_cv_.notify_all();
    }

private:
    std::mutex mutex_;
    net::TcpConnection* connection_ = nullptr;
    std::optional<snn::TransientState> reply_;
    std::condition_variable reply_cv_;
};

ProxyServer::ProxyServer(ServerConfig config)
    : config_(std::move(config)), link_(std::make_shared<SocketDeviceLink>())
{
    ProxyConfig proxy_config;
    proxy_config.instance_id = config_.instance_id;
    proxy_config.softstate_defaults = config_.softstate_defaults;
    proxy_config.snapshot_max_age = config_.snapshot_max_age;
    proxy_ = std::make_unique<NspProxy>(proxy_config, link_, &broker_);
}

ProxyServer::~ProxyServer()
{
    stop();
}

TimeNs ProxyServer::now() const
{
    const auto elapsed = std::chrono::steady_clock::now() - epoch_;
    return static_cast<TimeNs>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count());
}

void ProxyServer::start()
{
    epoch_ = std::chrono::steady_clock::now();
    aer_listener_ = net::TcpListener(config_.aer_port);
    pubsub_listener_ = net::TcpListener(config_.pubsub_port);
    query_listener_ = net::TcpListener(config_.query_port);
    running_ = true;
    threads_.emplace_back(&ProxyServer::aer_loop, this);
    threads_.emplace_back(&ProxyServer::pubsub_loop, this);
    threads_.emplace_back(&ProxyServer::query_loop, this);
    threads_.emplace_back(&ProxyServer::housekeeping_loop, this);
    log_info("proxy " + config_.instance_id + " listening: aer=" +
             std::to_string(aer_listener_.port()) + " pubsub=" +
             std::to_string(pubsub_listener_.port()) + " query=" +
             std::to_string(query_listener_.port()));
}

void ProxyServer::stop()
{
    if (!running_.exchange(false)) {
        return;
    }
    aer_listener_.close();
    pubsub_listener_.close();
    query_listener_.close();
    for (std::thread& t : threads_) {
        if (t.joinable()) {
            t.join();
        }
    }
    threads_.clear();
    std::lock_guard lock(session_mutex_);
    for (std::thread& t : sessions_) {
        if (t.joinable()) {
            t.join();
        }
    }
    sessions_.clear();
}

std::uint16_t ProxyServer::aer_port() const { return aer_listener_.port(); }
std::uint16_t ProxyServer::pubsub_port() const { return pubsub_listener_.port(); }
std::uint16_t ProxyServer::query_port() const { return query_listener_.port(); }

void ProxyServer::aer_loop()
{
    while (running_) {
        auto accepted = aer_listener_.accept_one();
        if (!accepted.has_value()) {
            return;
        }
        net::TcpConnection device = std::move(*accepted);
        device.set_receive_timeout(100);
        link_->attach(&device);
        log_info("NC device connected");
        if (!config_.objectives_path.empty()) {
            try {
                std::ifstream in(config_.objectives_path);
                std::string text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                proxy_->apply_objectives(decl::parse_objectives(text));
            } catch (const Error& e) {
                log_error(std::string("objective application failed: ") + e.what());
            }
        }
        aer::StreamDecoder decoder;
        while (running_) {
            const auto chunk = device.receive_some();
            if (!chunk.has_value()) {
                break;
            }
            if (chunk->empty()) {
                continue;  // timeout; re-check running_
            }
            decoder.feed(*chunk);
            try {
                while (auto packet = decoder.next()) {
                    if (packet->kind == aer::PacketKind::kEvents) {
                        for (const SpikeEvent& event : packet->events) {
                            proxy_->on_output_spike(event);
                        }
                    } else {
                        const auto message = parse_control_packet(*packet);
                        if (const auto* reply = std::get_if<SnapshotReply>(&message)) {
                            link_->deliver_reply(reply->state);
                        }
                    }
                }
            } catch (const Error& e) {
                log_error(std::string("AER stream error: ") + e.what());
                break;
            }
        }
        link_->attach(nullptr);
        log_info("NC device disconnected");
    }
}

void ProxyServer::pubsub_loop()
{
    std::size_t session_id = 0;
    while (running_) {
        auto accepted = pubsub_listener_.accept_one();
        if (!accepted.has_value()) {
            return;
        }
        std::lock_guard lock(session_mutex_);
        sessions_.emplace_back(&ProxyServer::pubsub_session, this, std::move(*accepted),
                               ++session_id);
    }
}

void ProxyServer::pubsub_session(net::TcpConnection connection, std::size_t session_id)
{
    connection.set_receive_timeout(100);
    const std::string publisher = "client-" + std::to_string(session_id);
    std::uint64_t publish_seq = 0;
    std::mutex state_mutex;  // guards subs and writes
    std::vector<std::uint64_t> subs;

    std::atomic<bool> open{true};
    std::thread pump([&] {
        // Forward queued deliveries as EVT lines.
        while (open && running_) {
            bool idle = true;
            std::vector<std::uint64_t> current;
            {
                std::lock_guard lock(state_mutex);
                current = subs;
            }
            for (const std::uint64_t id : current) {
                for (const auto& n : broker_.poll(id, 32)) {
                    idle = false;
                    std::lock_guard lock(state_mutex);
                    try {
                        connection.send_line(pubsub::format_evt(n));
                    } catch (const IoError&) {
                        open = false;
                        return;
                    }
                }
            }
            if (idle) {
                std::this_thread::sleep_for(2ms);
            }
        }
    });

    while (running_ && open) {
        const auto line = connection.read_line(&running_);
        if (!line.has_value()) {
            break;
        }
        if (line->empty()) {
            continue;
        }
        std::string response = "OK";
        try {
            const auto frame = pubsub::parse_frame(*line);
            if (const auto* sub = std::get_if<pubsub::SubCommand>(&frame)) {
                const auto id = broker_.subscribe(sub->pattern, sub->predicate);
                {
                    std::lock_guard lock(state_mutex);
                    subs.push_back(id);
                }
                response = "OK " + std::to_string(id);
            } else if (const auto* pub = std::get_if<pubsub::PubCommand>(&frame)) {
                pubsub::Notification n;
                n.topic = pub->topic;
                n.attributes = pub->attributes;
                n.publisher = publisher;
                n.publish_seq = ++publish_seq;
                n.publish_time = now();
                const auto delivered = broker_.publish(n);
                response = "OK " + std::to_string(delivered);
            } else {
                response = "ERR EVT frames are server-to-client only";
            }
        } catch (const Error& e) {
            response = std::string("ERR ") + e.what();
        }
        std::lock_guard lock(state_mutex);
        try {
            connection.send_line(response);
        } catch (const IoError&) {
            break;
        }
    }
    open = false;
    pump.join();
    std::lock_guard lock(state_mutex);
    for (const std::uint64_t id : subs) {
        broker_.unsubscribe(id);
    }
}

void ProxyServer::query_loop()
{
    while (running_) {
        auto accepted = query_listener_.accept_one();
        if (!accepted.has_value()) {
            return;
        }
        std::lock_guard lock(session_mutex_);
        sessions_.emplace_back(&ProxyServer::query_session, this, std::move(*accepted));
    }
}

void ProxyServer::query_session(net::TcpConnection connection)
{
    connection.set_receive_timeout(100);
    while (running_) {
        const auto line = connection.read_line(&running_);
        if (!line.has_value()) {
            return;
        }
        if (line->empty()) {
            continue;
        }
        std::string response;
        try {
            const auto query = graph::GraphQuery::parse(*line);
            const auto tree = proxy_->serve_query(query, now());
            response = graph::result_to_json(tree).dump();
        } catch (const Error& e) {
            nlohmann::ordered_json err;
            err["error"] = e.what();
            response = err.dump();
        }
        try {
            connection.send_line(response);
        } catch (const IoError&) {
            return;
        }
    }
}

void ProxyServer::housekeeping_loop()
{
    std::ofstream sink;
    if (!config_.offload_sink.empty()) {
        sink.open(config_.offload_sink, std::ios::app);
    }
    while (running_) {
        std::this_thread::sleep_for(50ms);
        proxy_->sweep(now());
        if (sink.is_open()) {
            try {
                proxy_->offload_snapshots(sink, now());
            } catch (const Error& e) {
                log_error(std::string("offload failed: ") + e.what());
            }
        }
    }
}

}  // namespace neuroproxy::nsp
