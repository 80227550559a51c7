#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace neuroproxy::net {

/// Thin RAII wrappers around POSIX stream sockets; enough for the AER,
/// pubsub, and query listeners.
class TcpConnection {
public:
    TcpConnection() = default;
    explicit TcpConnection(int fd) : fd_(fd) {}
    ~TcpConnection();

    TcpConnection(TcpConnection&& other) noexcept;
    TcpConnection& operator=(TcpConnection&& other) noexcept;
    TcpConnection(const TcpConnection&) = delete;
    TcpConnection& operator=(const TcpConnection&) = delete;

    static TcpConnection connect_to(const std::string& host, std::uint16_t port);

    bool valid() const { return fd_ >= 0; }
    void close();

    /// Sends the whole buffer; throws IoError on failure.
    void send_all(const void* data, std::size_t size);
    void send_line(const std::string& line);  // appends '\n'

    /// Bounds each receive_some/read_line wait; 0 disables the bound.
    void set_receive_timeout(int milliseconds);

    /// Receives up to `max` bytes. nullopt = connection closed or failed;
    /// an empty vector = receive timeout elapsed.
    std::optional<std::vector<std::uint8_t>> receive_some(std::size_t max = 4096);

    /// Reads until '\n' (not included); nullopt on shutdown, an empty
    /// optional-with-value never happens on timeout — timeouts keep
    /// waiting unless `keep_waiting` (when given) has become false.
    std::optional<std::string> read_line(const std::atomic<bool>* keep_waiting = nullptr);

    int fd() const { return fd_; }

private:
    int fd_ = -1;
    std::string line_buffer_;
};

class TcpListener {
public:
    TcpListener() = default;
    /// Binds and listens on 127.0.0.1:port; port 0 picks an ephemeral one.
    explicit TcpListener(std::uint16_t port);
    ~TcpListener();

    TcpListener(TcpListener&& other) noexcept;
    TcpListener& operator=(TcpListener&& other) noexcept;
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    /// Accepts one connection; nullopt when the listener was closed.
    std::optional<TcpConnection> accept_one();

    std::uint16_t port() const { return port_; }
    bool valid() const { return fd_ >= 0; }
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace neuroproxy::net
