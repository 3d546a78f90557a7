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

#pragma once

#include <memory>
#include <span>

#include "rc4sim/hwsim.hpp"
#include "rc4sim/rc4_ref.hpp"

namespace rc4sim {

/// Continuous keystream from any of the six designs.
class KeystreamSource {
  public:
    virtual ~KeystreamSource() = default;

    virtual void generate(std::span<Octet> out) = 0;
    virtual CycleReport report() const = 0;
    virtual Design design() const noexcept = 0;

    /// XORs the next data.size() keystream octets into @p data.
    void apply(std::span<Octet> data);
};

std::unique_ptr<KeystreamSource> make_keystream(Design design, const SecretKey& key);

}  // namespace rc4sim
