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
 * @file rc4_ref.hpp
 * @brief Plain software RC4. Every simulated design is checked against it.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rc4sim {

using Octet = std::uint8_t;
using Bytes = std::vector<Octet>;

/// Raised for caller errors: bad key length, mismatched buffers, bad hex.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the simulator reaches a state its own model says cannot happen.
class InvariantViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/**
 * RC4 secret key, 1 to 256 octets. Shorter keys are indexed modulo their
 * length during key scheduling, so no padded 256-byte copy is kept.
 */
class SecretKey {
  public:
    static constexpr std::size_t kMinLength = 1;
    static constexpr std::size_t kMaxLength = 256;

    explicit SecretKey(std::span<const Octet> bytes);

    static SecretKey from_ascii(std::string_view text);
    /// Accepts an even number of hex digits, upper or lower case.
    static SecretKey from_hex(std::string_view hex);

    std::size_t size() const noexcept { return bytes_.size(); }
    std::span<const Octet> bytes() const noexcept { return bytes_; }

    /// K[i mod l]
    Octet at(std::size_t i) const noexcept { return bytes_[i % bytes_.size()]; }

    friend bool operator==(const SecretKey&, const SecretKey&) = default;

  private:
    Bytes bytes_;
};

/// 256-entry byte permutation.
class SBox {
  public:
    static constexpr std::size_t kSize = 256;

    /// Identity permutation.
    SBox() noexcept;

    Octet operator[](std::size_t idx) const noexcept { return entries_[idx & 0xff]; }
    Octet& operator[](std::size_t idx) noexcept { return entries_[idx & 0xff]; }

    void swap(Octet a, Octet b) noexcept;
    bool is_permutation() const noexcept;

    const std::array<Octet, kSize>& entries() const noexcept { return entries_; }

    friend bool operator==(const SBox&, const SBox&) = default;

  private:
    std::array<Octet, kSize> entries_;
};

/// One PRGA iteration as seen by the oracle.
struct KeystreamStep {
    Octet i;
    Octet j;
    Octet t;
    Octet z;
};

/**
 * Reference PRGA state. i and j start at 0 and i is incremented before use,
 * so the first output uses i = 1.
 */
class ReferenceStream {
  public:
    explicit ReferenceStream(const SBox& scheduled) : sbox_(scheduled) {}
    explicit ReferenceStream(const SecretKey& key);

    KeystreamStep step() noexcept;
    void generate(std::span<Octet> out) noexcept;

    const SBox& sbox() const noexcept { return sbox_; }
    Octet i() const noexcept { return i_; }
    Octet j() const noexcept { return j_; }

  private:
    SBox sbox_;
    Octet i_ = 0;
    Octet j_ = 0;
};

/// 256 iterations of j += S[i] + K[i mod l]; swap(S[i], S[j]).
SBox ksa_reference(const SecretKey& key);

/// Emits n octets; @p sbox is advanced in place.
Bytes prga_reference(SBox& sbox, std::size_t n);

/// Convenience: ksa_reference followed by prga_reference.
Bytes keystream_reference(const SecretKey& key, std::size_t n);

/// Element-wise XOR. Throws InvalidInput on length mismatch.
Bytes xor_cipher(std::span<const Octet> data, std::span<const Octet> keystream);

/// In-place variant used by the streaming paths.
void xor_into(std::span<Octet> data, std::span<const Octet> keystream);

Bytes parse_hex(std::string_view hex);
std::string to_hex(std::span<const Octet> bytes);

}  // namespace rc4sim
