/*
 * Copyright 2026 The rc4sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rc4sim/netlink.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <istream>

namespace rc4sim::netlink {

namespace {

void put_be32(Octet* p, std::uint32_t v) {
    p[0] = static_cast<Octet>(v >> 24);
    p[1] = static_cast<Octet>(v >> 16);
    p[2] = static_cast<Octet>(v >> 8);
    p[3] = static_cast<Octet>(v);
}

std::uint32_t get_be32(const Octet* p) {
    return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
}

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

void accumulate(TransferSummary& into, const TransferSummary& part) {
    into.frames += part.frames;
    into.bytes += part.bytes;
    into.acks_matched += part.acks_matched;
    into.acks_mismatched += part.acks_mismatched;
}

}  // namespace

std::array<Octet, kHeaderSize> encode_header(const FrameHeader& h) {
    std::array<Octet, kHeaderSize> raw{};
    std::copy(kMagic.begin(), kMagic.end(), raw.begin());
    raw[4] = h.design_id;
    put_be32(raw.data() + 5, h.seq);
    put_be32(raw.data() + 9, h.length);
    return raw;
}

FrameHeader decode_header(std::span<const Octet, kHeaderSize> raw) {
    if (!std::equal(kMagic.begin(), kMagic.end(), raw.begin())) throw ProtocolError("bad magic");
    FrameHeader h;
    h.design_id = raw[4];
    h.seq = get_be32(raw.data() + 5);
    h.length = get_be32(raw.data() + 9);
    if (h.length > kMaxPayload) throw ProtocolError("payload length " + std::to_string(h.length) + " too large");
    return h;
}

Bytes encode_frame(std::uint8_t design_id, std::uint32_t seq, std::span<const Octet> payload) {
    if (payload.size() > kMaxPayload) throw InvalidInput("frame payload too large");
    const auto head = encode_header({design_id, seq, static_cast<std::uint32_t>(payload.size())});
    Bytes out(head.begin(), head.end());
    if (!payload.empty()) out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::uint32_t checksum(std::span<const Octet> data, std::uint32_t seed) noexcept {
    std::uint32_t sum = seed;
    for (Octet b : data) sum += b;
    return sum;
}

// ---------------------------------------------------------------------------
// Socket

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

Socket Socket::connect_to(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw NetworkError("resolve " + host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses for " + host;
    for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (!s.valid()) {
            last_error = errno_text("socket");
            continue;
        }
        if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
            ::freeaddrinfo(res);
            int one = 1;
            ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return s;
        }
        last_error = errno_text(("connect " + host + ":" + service).c_str());
    }
    ::freeaddrinfo(res);
    throw NetworkError(last_error);
}

void Socket::send_all(std::span<const Octet> data) {
    while (!data.empty()) {
        const auto n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw NetworkError(errno_text("send"));
        }
        data = data.subspan(static_cast<std::size_t>(n));
    }
}

bool Socket::recv_all(std::span<Octet> out) {
    std::size_t got = 0;
    while (got < out.size()) {
        const auto n = ::recv(fd_, out.data() + got, out.size() - got, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw NetworkError(errno_text("recv"));
        }
        if (n == 0) {
            if (got == 0) return false;
            throw NetworkError("connection closed mid-frame");
        }
        got += static_cast<std::size_t>(n);
    }
    return true;
}

void Socket::reset() noexcept {
    if (fd_ < 0) return;
    linger lg{1, 0};
    ::setsockopt(fd_, SOL_SOCKET, SO_LINGER, &lg, sizeof lg);
    close();
}

void Socket::shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() noexcept {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

// ---------------------------------------------------------------------------
// Server

Server::Server(SecretKey key, Design design, std::uint16_t port, std::string bind_address)
    : key_(std::move(key)), design_(design), port_(port), bind_address_(std::move(bind_address)) {
    // Rejects a key that cannot drive the design (e.g. too short to split).
    make_keystream(design_, key_);
}

Server::~Server() { stop(); }

void Server::start() {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) throw NetworkError(errno_text("socket"));
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port_);
    if (::inet_pton(AF_INET, bind_address_.c_str(), &addr.sin_addr) != 1) {
        throw NetworkError("invalid bind address " + bind_address_);
    }
    if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        throw NetworkError(errno_text(("bind port " + std::to_string(port_)).c_str()));
    }
    if (::listen(s.fd(), 16) != 0) throw NetworkError(errno_text("listen"));

    socklen_t len = sizeof addr;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    listener_ = std::move(s);
    running_ = true;
}

void Server::serve_forever() {
    if (!running_) start();
    accept_loop();
}

void Server::start_background() {
    if (!running_) start();
    acceptor_ = std::jthread([this] { accept_loop(); });
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    listener_.shutdown();
    {
        std::lock_guard lock(mu_);
        for (int fd : live_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::jthread> handlers;
    {
        std::lock_guard lock(mu_);
        handlers.swap(handlers_);
    }
    handlers.clear();  // joins
    listener_.close();
}

ServerStats Server::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

void Server::accept_loop() {
    std::uint64_t next_id = 0;
    while (running_) {
        const int fd = ::accept(listener_.fd(), nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break;  // listener shut down
        }
        if (!running_) {
            ::close(fd);
            break;
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        const auto id = next_id++;
        std::lock_guard lock(mu_);
        ++stats_.connections;
        live_fds_.push_back(fd);
        handlers_.emplace_back([this, fd, id] { handle(Socket(fd), id); });
    }
}

void Server::record_reset(std::uint64_t id, const std::string& reason) {
    const auto line = "connection " + std::to_string(id) + " reset: " + reason;
    if (log_) log_(line);
    std::lock_guard lock(mu_);
    stats_.resets.push_back(line);
}

void Server::handle(Socket conn, std::uint64_t id) {
    const int fd = conn.fd();
    auto keystream = make_keystream(design_, key_);
    std::uint32_t expected_seq = 0;
    std::array<Octet, kHeaderSize> raw{};
    Bytes payload;
    bool reset = false;
    try {
        while (conn.recv_all(raw)) {
            const auto h = decode_header(raw);
            if (h.design_id != design_number(design_)) {
                throw ProtocolError("design mismatch: peer uses " + std::to_string(h.design_id) + ", expected " +
                                    std::to_string(design_number(design_)));
            }
            if (h.seq != expected_seq) {
                throw ProtocolError("sequence gap: got " + std::to_string(h.seq) + ", expected " +
                                    std::to_string(expected_seq));
            }
            ++expected_seq;
            payload.resize(h.length);
            if (h.length > 0 && !conn.recv_all(payload)) throw ProtocolError("connection closed mid-frame");
            keystream->apply(payload);

            if (sink_) sink_(id, payload);

            std::array<Octet, 4> sum{};
            put_be32(sum.data(), checksum(payload));
            conn.send_all(encode_frame(h.design_id, h.seq, sum));

            std::lock_guard lock(mu_);
            ++stats_.frames;
            stats_.bytes += h.length;
        }
        if (log_) {
            log_("connection " + std::to_string(id) + " closed after " + std::to_string(expected_seq) + " frames");
        }
    } catch (const ProtocolError& e) {
        record_reset(id, e.what());
        reset = true;
    } catch (const NetworkError& e) {
        if (running_) record_reset(id, e.what());
    }
    {
        std::lock_guard lock(mu_);
        live_fds_.erase(std::remove(live_fds_.begin(), live_fds_.end(), fd), live_fds_.end());
    }
    if (reset) conn.reset();
}

// ---------------------------------------------------------------------------
// Client

Client::Client(const std::string& host, std::uint16_t port, const SecretKey& key, Design design,
               std::size_t frame_size)
    : design_(design), frame_size_(frame_size), keystream_(make_keystream(design, key)) {
    if (frame_size_ == 0 || frame_size_ > kMaxPayload) throw InvalidInput("frame size out of range");
    sock_ = Socket::connect_to(host, port);
}

void Client::send_frame(std::span<const Octet> plaintext, TransferSummary& summary) {
    const auto expected = checksum(plaintext);
    buffer_.assign(plaintext.begin(), plaintext.end());
    keystream_->apply(buffer_);
    keystream_used_ += buffer_.size();

    const auto seq = seq_++;
    const auto id = static_cast<std::uint8_t>(design_number(design_));
    sock_.send_all(encode_frame(id, seq, buffer_));

    std::array<Octet, kHeaderSize> raw{};
    if (!sock_.recv_all(raw)) throw NetworkError("peer closed before acknowledging frame " + std::to_string(seq));
    const auto h = decode_header(raw);
    if (h.seq != seq || h.length != 4) throw ProtocolError("malformed ack for frame " + std::to_string(seq));
    std::array<Octet, 4> sum{};
    if (!sock_.recv_all(sum)) throw NetworkError("peer closed mid-ack");

    ++summary.frames;
    summary.bytes += plaintext.size();
    if (get_be32(sum.data()) == expected) {
        ++summary.acks_matched;
    } else {
        ++summary.acks_mismatched;
    }
}

TransferSummary Client::send(std::span<const Octet> data) {
    TransferSummary summary;
    try {
        while (!data.empty()) {
            const auto n = std::min(data.size(), frame_size_);
            send_frame(data.first(n), summary);
            data = data.subspan(n);
        }
    } catch (const std::runtime_error& e) {
        accumulate(totals_, summary);
        throw TransferError(e.what(), summary);
    }
    accumulate(totals_, summary);
    return summary;
}

TransferSummary Client::send(std::istream& in) {
    TransferSummary summary;
    Bytes chunk(frame_size_);
    while (in) {
        in.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0) break;
        try {
            accumulate(summary, send(std::span<const Octet>(chunk.data(), got)));
        } catch (const TransferError& e) {
            auto partial = summary;
            accumulate(partial, e.partial());
            throw TransferError(e.what(), partial);
        }
    }
    return summary;
}

TransferSummary send(const std::string& host, std::uint16_t port, const SecretKey& key, Design design,
                     std::istream& in, std::size_t frame_size) {
    Client client(host, port, key, design, frame_size);
    auto summary = client.send(in);
    client.close();
    return summary;
}

}  // namespace rc4sim::netlink
