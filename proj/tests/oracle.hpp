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

// Test-only RC4 oracle and published vectors. Deliberately written without
// any rc4sim code so it can check the library independently.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using bytes = std::vector<std::uint8_t>;

inline bytes rc4_keystream(const bytes& key, std::size_t n) {
    std::uint8_t s[256];
    for (int k = 0; k < 256; ++k) s[k] = static_cast<std::uint8_t>(k);
    unsigned j = 0;
    for (unsigned i = 0; i < 256; ++i) {
        j = (j + s[i] + key[i % key.size()]) & 0xff;
        std::swap(s[i], s[j]);
    }
    bytes out(n);
    unsigned i = 0;
    j = 0;
    for (auto& z : out) {
        i = (i + 1) & 0xff;
        j = (j + s[i]) & 0xff;
        std::swap(s[i], s[j]);
        z = s[(s[i] + s[j]) & 0xff];
    }
    return out;
}

inline bytes from_hex(const std::string& hex) {
    bytes out;
    for (std::size_t k = 0; k + 1 < hex.size(); k += 2) out.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(k, 2), nullptr, 16)));
    return out;
}

inline bytes from_text(const std::string& s) { return bytes(s.begin(), s.end()); }

/// Published key / plaintext / ciphertext triples. An empty plaintext means
/// the expected value is the raw keystream (RFC 6229, offset 0).
struct PublishedVector {
    const char* source;
    bytes key;
    bytes plaintext;
    bytes expected;
};

inline std::vector<PublishedVector> published_vectors() {
    return {
        {"Key/Plaintext", from_text("Key"), from_text("Plaintext"), from_hex("bbf316e8d940af0ad3")},
        {"Wiki/pedia", from_text("Wiki"), from_text("pedia"), from_hex("1021bf0420")},
        {"Secret/Attack at dawn", from_text("Secret"), from_text("Attack at dawn"),
         from_hex("45a01f645fc35b383552544b9bf5")},
        {"RFC 6229 40-bit", from_hex("0102030405"), {}, from_hex("b2396305f03dc027ccc3524a0a1118a8")},
        {"RFC 6229 64-bit", from_hex("0102030405060708"), {}, from_hex("97ab8a1bf0afb96132f2f67258da15a8")},
        {"RFC 6229 128-bit", from_hex("0102030405060708090a0b0c0d0e0f10"), {},
         from_hex("9ac7cc9a609d1ef7b2932899cde41b97")},
    };
}

inline std::string to_hex_key(const bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (auto v : b) {
        out.push_back(digits[v >> 4]);
        out.push_back(digits[v & 15]);
    }
    return out;
}

inline bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

}  // namespace oracle
