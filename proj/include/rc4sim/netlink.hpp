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

/**
 * @file netlink.hpp
 * @brief Two-endpoint framed TCP link: the sender encrypts, the peer decrypts.
 *
 * Frame layout, all integers big-endian:
 *
 *     offset  size  field
 *          0     4  magic "RC4S"
 *          4     1  design id (1..6)
 *          5     4  sequence number, 0 for the first frame of a connection
 *          9     4  payload length
 *         13     n  payload
 *
 * Data frames carry ciphertext. Each data frame is answered by an ack frame
 * with the same header fields, length 4, and as payload the 32-bit sum
 * (mod 2^32) of the recovered plaintext octets. That sum is an integrity
 * hint for the demo, not a MAC.
 *
 * Each connection direction owns one keystream that runs continuously
 * across frames. Acks carry no ciphertext, so no keystream is ever reused.
 */

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rc4sim/hwsim.hpp"
#include "rc4sim/keystream.hpp"
#include "rc4sim/rc4_ref.hpp"

namespace rc4sim::netlink {

inline constexpr std::array<Octet, 4> kMagic = {'R', 'C', '4', 'S'};
inline constexpr std::size_t kHeaderSize = 13;
inline constexpr std::size_t kDefaultFrameSize = 64 * 1024;
inline constexpr std::uint32_t kMaxPayload = 16u * 1024 * 1024;

/// Malformed or out-of-contract frame.
class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NetworkError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FrameHeader {
    std::uint8_t design_id = 0;
    std::uint32_t seq = 0;
    std::uint32_t length = 0;

    friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

struct Frame {
    FrameHeader header;
    Bytes payload;
};

std::array<Octet, kHeaderSize> encode_header(const FrameHeader& h);
/// Throws ProtocolError on bad magic or a length above kMaxPayload.
FrameHeader decode_header(std::span<const Octet, kHeaderSize> raw);

Bytes encode_frame(std::uint8_t design_id, std::uint32_t seq, std::span<const Octet> payload);

/// Sum of octets mod 2^32.
std::uint32_t checksum(std::span<const Octet> data, std::uint32_t seed = 0) noexcept;

struct TransferSummary {
    std::uint64_t frames = 0;
    std::uint64_t bytes = 0;
    std::uint64_t acks_matched = 0;
    std::uint64_t acks_mismatched = 0;

    bool all_acked() const noexcept { return acks_matched == frames && acks_mismatched == 0; }
};

/// Raised by Client::send with whatever was transferred before the failure.
class TransferError : public NetworkError {
  public:
    TransferError(const std::string& what, TransferSummary partial) : NetworkError(what), partial_(partial) {}
    const TransferSummary& partial() const noexcept { return partial_; }

  private:
    TransferSummary partial_;
};

/// Owning POSIX socket descriptor.
class Socket {
  public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    static Socket connect_to(const std::string& host, std::uint16_t port);

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }

    void send_all(std::span<const Octet> data);
    /// False on orderly EOF before the first octet; throws on EOF mid-buffer.
    bool recv_all(std::span<Octet> out);
    /// Close with an RST instead of a FIN.
    void reset() noexcept;
    void shutdown() noexcept;
    void close() noexcept;

  private:
    int fd_ = -1;
};

struct ServerStats {
    std::uint64_t connections = 0;
    std::uint64_t frames = 0;
    std::uint64_t bytes = 0;
    std::vector<std::string> resets;
};

/**
 * Decrypting endpoint. Each accepted connection gets its own thread and its
 * own keystream engine.
 */
class Server {
  public:
    using PlaintextSink = std::function<void(std::uint64_t connection, std::span<const Octet> plaintext)>;
    using Logger = std::function<void(const std::string&)>;

    Server(SecretKey key, Design design, std::uint16_t port = 0, std::string bind_address = "127.0.0.1");
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    void set_plaintext_sink(PlaintextSink sink) { sink_ = std::move(sink); }
    void set_logger(Logger log) { log_ = std::move(log); }

    /// Binds and listens; port() is valid afterwards.
    void start();
    /// Accept loop on the calling thread; returns after stop().
    void serve_forever();
    /// Accept loop on a background thread.
    void start_background();
    void stop();

    std::uint16_t port() const noexcept { return port_; }
    ServerStats stats() const;

  private:
    void accept_loop();
    void handle(Socket conn, std::uint64_t id);
    void record_reset(std::uint64_t id, const std::string& reason);

    SecretKey key_;
    Design design_;
    std::uint16_t port_;
    std::string bind_address_;
    Socket listener_;
    std::atomic<bool> running_{false};
    PlaintextSink sink_;
    Logger log_;

    mutable std::mutex mu_;
    ServerStats stats_;
    std::vector<int> live_fds_;
    std::vector<std::jthread> handlers_;
    std::jthread acceptor_;
};

/// Encrypting endpoint; one continuous keystream per connection.
class Client {
  public:
    Client(const std::string& host, std::uint16_t port, const SecretKey& key, Design design,
           std::size_t frame_size = kDefaultFrameSize);

    /// Splits @p data into frames and waits for each ack.
    TransferSummary send(std::span<const Octet> data);
    TransferSummary send(std::istream& in);
    void close() noexcept { sock_.close(); }

    const TransferSummary& totals() const noexcept { return totals_; }
    /// Keystream octets consumed on this connection.
    std::uint64_t keystream_used() const noexcept { return keystream_used_; }

  private:
    void send_frame(std::span<const Octet> plaintext, TransferSummary& summary);

    Socket sock_;
    Design design_;
    std::size_t frame_size_;
    std::unique_ptr<KeystreamSource> keystream_;
    std::uint32_t seq_ = 0;
    std::uint64_t keystream_used_ = 0;
    TransferSummary totals_;
    Bytes buffer_;
};

/// Connects, streams @p in, closes.
TransferSummary send(const std::string& host, std::uint16_t port, const SecretKey& key, Design design,
                     std::istream& in, std::size_t frame_size = kDefaultFrameSize);

}  // namespace rc4sim::netlink
