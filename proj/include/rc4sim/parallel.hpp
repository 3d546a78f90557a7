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
 * @file parallel.hpp
 * @brief Lane-parallel compositions feeding a 32-bit bus.
 *
 * Design 5 runs four design-2 engines, design 6 runs two design-4 engines.
 * Each lane is keyed with a contiguous fragment of the master key and all
 * lanes start their KSA on clock 0. Every steady-state clock one 4-octet
 * bus word is packed:
 *
 *     keystream octet k  ->  bus word k / 4, position k % 4
 *     design 5: position p comes from lane p
 *     design 6: positions 0,1 from lane 0 (its Z1,Z2); 2,3 from lane 1
 *
 * The result is four (or two) independent RC4 streams interleaved. It is
 * not the RC4 keystream of the master key, and ciphertext produced with it
 * does not interoperate with designs 1-4.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rc4sim/hwsim.hpp"
#include "rc4sim/rc4_ref.hpp"

namespace rc4sim::parallel {

inline constexpr unsigned kBusWidthBits = 32;
inline constexpr unsigned kBusOctets = kBusWidthBits / 8;

struct LaneConfig {
    Design design = Design::D5;
    unsigned lanes = 4;
    Design engine_design = Design::D2;
    unsigned bus_width_bits = kBusWidthBits;
    std::vector<SecretKey> sub_keys;
    /// Source lane for each bus position.
    std::array<std::uint8_t, kBusOctets> position_lane{};

    /// Throws UnsupportedDesign for designs 1-4 and InvalidInput if the key
    /// is shorter than the lane count.
    static LaneConfig for_design(Design design, const SecretKey& key);

    unsigned octets_per_lane_clock() const noexcept { return kBusOctets / lanes; }
};

/**
 * Contiguous split into @p lanes fragments; the first (l mod lanes)
 * fragments are one octet longer.
 */
std::vector<SecretKey> split_key(const SecretKey& key, unsigned lanes);

struct BusWord {
    std::array<Octet, kBusOctets> octets{};
    std::array<std::uint8_t, kBusOctets> source_lanes{};
};

/// Position p of the word holds lane_outputs[p]; source lanes per design.
BusWord pack_bus_word(std::span<const Octet, kBusOctets> lane_outputs, Design design);

struct LaneSchedule {
    /// Order lanes are clocked in each cycle; empty means 0, 1, 2, ...
    std::vector<unsigned> order;
    /// One worker thread per lane, synchronised by a per-clock barrier.
    bool threaded = false;
};

class ParallelEngine {
  public:
    ParallelEngine(Design design, const SecretKey& key, LaneSchedule schedule = {});

    /// Clocks all lanes through their KSA and PRGA initialisation clock.
    void finish_ksa();
    void generate(std::span<Octet> out);
    Bytes generate(std::size_t n);

    CycleReport report() const;
    const LaneConfig& config() const noexcept { return config_; }
    Design design() const noexcept { return config_.design; }
    /// Bus words packed so far.
    std::uint64_t words() const noexcept { return words_; }
    std::uint64_t first_word_clock() const noexcept { return first_word_clock_; }
    std::uint64_t stalls() const noexcept { return stalls_; }

  private:
    /// Packs whatever the lanes produced in the clock just simulated.
    void pack_clock(const std::vector<hwsim::Emission>& emitted);
    void step_lane(unsigned lane, hwsim::Emission& out);
    void run_sequential(std::size_t target);
    void run_threaded(std::size_t target);
    std::size_t buffered() const noexcept;

    struct PackedWord {
        std::array<Octet, kBusOctets> octets;
        std::uint64_t clock;
    };

    LaneConfig config_;
    LaneSchedule schedule_;
    std::vector<hwsim::Engine> lanes_;
    std::vector<Bytes> lane_fifo_;
    std::vector<PackedWord> ready_;
    std::size_t ready_word_ = 0;
    unsigned ready_offset_ = 0;

    std::uint64_t clock_ = 0;
    std::uint64_t words_ = 0;
    std::uint64_t stalls_ = 0;
    std::uint64_t first_word_clock_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t last_delivery_clock_ = 0;
};

/// Full run: n octets of the interleaved keystream plus its clock report.
hwsim::SimResult simulate_parallel(Design design, const SecretKey& key, std::size_t n, LaneSchedule schedule = {});

/// Octets of lane @p lane, in lane order, pulled out of an interleaved stream.
Bytes deinterleave(std::span<const Octet> keystream, Design design, unsigned lane);

}  // namespace rc4sim::parallel
