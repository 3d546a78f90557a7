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

#include "rc4sim/rc4_ref.hpp"

#include <bitset>
#include <numeric>
#include <string>

namespace rc4sim {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

SecretKey::SecretKey(std::span<const Octet> bytes) : bytes_(bytes.begin(), bytes.end()) {
    if (bytes_.size() < kMinLength || bytes_.size() > kMaxLength) {
        throw InvalidInput("RC4 key length must be in [1, 256], got " + std::to_string(bytes_.size()));
    }
}

SecretKey SecretKey::from_ascii(std::string_view text) {
    Bytes raw(text.begin(), text.end());
    return SecretKey(raw);
}

SecretKey SecretKey::from_hex(std::string_view hex) {
    return SecretKey(parse_hex(hex));
}

SBox::SBox() noexcept {
    std::iota(entries_.begin(), entries_.end(), Octet{0});
}

void SBox::swap(Octet a, Octet b) noexcept {
    std::swap(entries_[a], entries_[b]);
}

bool SBox::is_permutation() const noexcept {
    std::bitset<kSize> seen;
    for (Octet v : entries_) seen.set(v);
    return seen.all();
}

ReferenceStream::ReferenceStream(const SecretKey& key) : sbox_(ksa_reference(key)) {}

KeystreamStep ReferenceStream::step() noexcept {
    i_ = static_cast<Octet>(i_ + 1);
    j_ = static_cast<Octet>(j_ + sbox_[i_]);
    sbox_.swap(i_, j_);
    const auto t = static_cast<Octet>(sbox_[i_] + sbox_[j_]);
    return {i_, j_, t, sbox_[t]};
}

void ReferenceStream::generate(std::span<Octet> out) noexcept {
    for (auto& z : out) z = step().z;
}

SBox ksa_reference(const SecretKey& key) {
    SBox s;
    Octet j = 0;
    for (std::size_t i = 0; i < SBox::kSize; ++i) {
        j = static_cast<Octet>(j + s[i] + key.at(i));
        s.swap(static_cast<Octet>(i), j);
    }
    return s;
}

Bytes prga_reference(SBox& sbox, std::size_t n) {
    ReferenceStream stream(sbox);
    Bytes out(n);
    stream.generate(out);
    sbox = stream.sbox();
    return out;
}

Bytes keystream_reference(const SecretKey& key, std::size_t n) {
    auto s = ksa_reference(key);
    return prga_reference(s, n);
}

Bytes xor_cipher(std::span<const Octet> data, std::span<const Octet> keystream) {
    Bytes out(data.begin(), data.end());
    xor_into(out, keystream);
    return out;
}

void xor_into(std::span<Octet> data, std::span<const Octet> keystream) {
    if (data.size() != keystream.size()) {
        throw InvalidInput("xor_cipher: data is " + std::to_string(data.size()) + " bytes but keystream is " +
                           std::to_string(keystream.size()));
    }
    for (std::size_t k = 0; k < data.size(); ++k) data[k] ^= keystream[k];
}

Bytes parse_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw InvalidInput("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t k = 0; k < hex.size(); k += 2) {
        const int hi = hex_value(hex[k]);
        const int lo = hex_value(hex[k + 1]);
        if (hi < 0 || lo < 0) throw InvalidInput("invalid hex digit in '" + std::string(hex) + "'");
        out.push_back(static_cast<Octet>(hi << 4 | lo));
    }
    return out;
}

std::string to_hex(std::span<const Octet> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (Octet b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

}  // namespace rc4sim
