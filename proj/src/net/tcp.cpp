#include "neuroproxy/net/tcp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::net {

namespace {

[[noreturn]] void fail(const std::string& what)
{
    throw IoError(what + ": " + std::strerror(errno));
}

}  // namespace

TcpConnection::~TcpConnection()
{
    close();
}

TcpConnection::TcpConnection(TcpConnection&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), line_buffer_(std::move(other.line_buffer_))
{
}

TcpConnection& TcpConnection::operator=(TcpConnection&& other) noexcept
{
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
        line_buffer_ = std::move(other.line_buffer_);
    }
    return *this;
}

TcpConnection TcpConnection::connect_to(const std::string& host, std::uint16_t port)
{
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        fail("socket");
    }
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw IoError("bad address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        fail("connect");
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return TcpConnection(fd);
}

void TcpConnection::close()
{
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

void TcpConnection::send_all(const void* data, std::size_t size)
{
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    std::size_t sent = 0;
    while (sent < size) {
        const ssize_t n = ::send(fd_, bytes + sent, size - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

void TcpConnection::send_line(const std::string& line)
{
    std::string framed = line;
    framed += '\n';
    send_all(framed.data(), framed.size());
}

void TcpConnection::set_receive_timeout(int milliseconds)
{
    timeval tv{};
    tv.tv_sec = milliseconds / 1000;
    tv.tv_usec = (milliseconds % 1000) * 1000;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

std::optional<std::vector<std::uint8_t>> TcpConnection::receive_some(std::size_t max)
{
    std::vector<std::uint8_t> buffer(max);
    while (true) {
        const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (errno == EAGAIN || errno == EWOULDBLOCK) {
                return std::vector<std::uint8_t>{};  // timeout
            }
            return std::nullopt;
        }
        if (n == 0) {
            return std::nullopt;  // orderly shutdown
        }
        buffer.resize(static_cast<std::size_t>(n));
        return buffer;
    }
}

std::optional<std::string> TcpConnection::read_line(const std::atomic<bool>* keep_waiting)
{
    while (true) {
        const std::size_t newline = line_buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = line_buffer_.substr(0, newline);
            line_buffer_.erase(0, newline + 1);
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            return line;
        }
        const auto chunk = receive_some();
        if (!chunk.has_value()) {
            return std::nullopt;
        }
        if (chunk->empty()) {
            if (keep_waiting != nullptr && !keep_waiting->load()) {
                return std::nullopt;
            }
            continue;
        }
        line_buffer_.append(chunk->begin(), chunk->end());
    }
}

TcpListener::TcpListener(std::uint16_t port)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        fail("socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        fd_ = -1;
        fail("bind");
    }
    if (::listen(fd_, 16) != 0) {
        ::close(fd_);
        fd_ = -1;
        fail("listen");
    }
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
        port_ = ntohs(addr.sin_port);
    }
}

TcpListener::~TcpListener()
{
    close();
}

TcpListener::TcpListener(TcpListener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), port_(std::exchange(other.port_, 0))
{
}

TcpListener& TcpListener::operator=(TcpListener&& other) noexcept
{
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
        port_ = std::exchange(other.port_, 0);
    }
    return *this;
}

std::optional<TcpConnection> TcpListener::accept_one()
{
    while (true) {
        const int client = ::accept(fd_, nullptr, nullptr);
        if (client < 0) {
            if (errno == EINTR) {
                continue;
            }
            return std::nullopt;
        }
        const int one = 1;
        ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return TcpConnection(client);
    }
}

void TcpListener::close()
{
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace neuroproxy::net
