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

#include "rc4sim/keystream.hpp"

#include <array>

#include "rc4sim/parallel.hpp"

namespace rc4sim {

namespace {

template <class EngineT>
class EngineSource final : public KeystreamSource {
  public:
    EngineSource(Design design, const SecretKey& key) : engine_(design, key) {}

    void generate(std::span<Octet> out) override { engine_.generate(out); }
    CycleReport report() const override { return engine_.report(); }
    Design design() const noexcept override { return engine_.design(); }

  private:
    EngineT engine_;
};

}  // namespace

void KeystreamSource::apply(std::span<Octet> data) {
    std::array<Octet, 4096> ks;
    while (!data.empty()) {
        const auto n = std::min(data.size(), ks.size());
        const auto chunk = std::span<Octet>(ks).first(n);
        generate(chunk);
        xor_into(data.first(n), chunk);
        data = data.subspan(n);
    }
}

std::unique_ptr<KeystreamSource> make_keystream(Design design, const SecretKey& key) {
    if (is_parallel(design)) return std::make_unique<EngineSource<parallel::ParallelEngine>>(design, key);
    return std::make_unique<EngineSource<hwsim::Engine>>(design, key);
}

}  // namespace rc4sim
