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

#include "rc4sim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <numeric>
#include <thread>

namespace rc4sim::parallel {

using hwsim::Emission;

LaneConfig LaneConfig::for_design(Design design, const SecretKey& key) {
    LaneConfig cfg;
    cfg.design = design;
    switch (design) {
        case Design::D5:
            cfg.lanes = 4;
            cfg.engine_design = Design::D2;
            cfg.position_lane = {0, 1, 2, 3};
            break;
        case Design::D6:
            cfg.lanes = 2;
            cfg.engine_design = Design::D4;
            cfg.position_lane = {0, 0, 1, 1};
            break;
        default:
            throw UnsupportedDesign("design " + std::to_string(design_number(design)) +
                                    " is a single engine; use the hwsim simulator");
    }
    cfg.sub_keys = split_key(key, cfg.lanes);
    return cfg;
}

std::vector<SecretKey> split_key(const SecretKey& key, unsigned lanes) {
    if (lanes == 0) throw InvalidInput("lane count must be positive");
    if (key.size() < lanes) {
        throw InvalidInput("key of " + std::to_string(key.size()) + " octets cannot be split across " +
                           std::to_string(lanes) + " lanes");
    }
    const auto bytes = key.bytes();
    const std::size_t base = bytes.size() / lanes;
    const std::size_t extra = bytes.size() % lanes;
    std::vector<SecretKey> out;
    out.reserve(lanes);
    std::size_t offset = 0;
    for (unsigned p = 0; p < lanes; ++p) {
        const std::size_t len = base + (p < extra ? 1 : 0);
        out.emplace_back(bytes.subspan(offset, len));
        offset += len;
    }
    return out;
}

BusWord pack_bus_word(std::span<const Octet, kBusOctets> lane_outputs, Design design) {
    if (!is_parallel(design)) throw UnsupportedDesign("bus packing applies to designs 5 and 6");
    BusWord w;
    for (unsigned p = 0; p < kBusOctets; ++p) {
        w.octets[p] = lane_outputs[p];
        w.source_lanes[p] = static_cast<std::uint8_t>(design == Design::D5 ? p : p / 2);
    }
    return w;
}

Bytes deinterleave(std::span<const Octet> keystream, Design design, unsigned lane) {
    const auto cfg_lanes = design == Design::D5 ? 4u : 2u;
    if (!is_parallel(design) || lane >= cfg_lanes) throw InvalidInput("no such lane");
    Bytes out;
    for (std::size_t k = 0; k < keystream.size(); ++k) {
        const unsigned pos = static_cast<unsigned>(k % kBusOctets);
        const unsigned src = design == Design::D5 ? pos : pos / 2;
        if (src == lane) out.push_back(keystream[k]);
    }
    return out;
}

ParallelEngine::ParallelEngine(Design design, const SecretKey& key, LaneSchedule schedule)
    : config_(LaneConfig::for_design(design, key)), schedule_(std::move(schedule)) {
    if (schedule_.order.empty()) {
        schedule_.order.resize(config_.lanes);
        std::iota(schedule_.order.begin(), schedule_.order.end(), 0u);
    }
    auto sorted = schedule_.order;
    std::sort(sorted.begin(), sorted.end());
    for (unsigned p = 0; p < sorted.size(); ++p) {
        if (sorted.size() != config_.lanes || sorted[p] != p) {
            throw InvalidInput("lane schedule must be a permutation of 0.." + std::to_string(config_.lanes - 1));
        }
    }
    lanes_.reserve(config_.lanes);
    for (const auto& sub : config_.sub_keys) lanes_.emplace_back(config_.engine_design, sub);
    lane_fifo_.resize(config_.lanes);
}

std::size_t ParallelEngine::buffered() const noexcept {
    return (ready_.size() - ready_word_) * kBusOctets - ready_offset_;
}

void ParallelEngine::step_lane(unsigned lane, Emission& out) {
    // One full clock: rising edge drives outputs, falling edge latches.
    out = lanes_[lane].step();
    lanes_[lane].step();
}

void ParallelEngine::pack_clock(const std::vector<Emission>& emitted) {
    for (unsigned p = 0; p < config_.lanes; ++p) {
        const auto v = emitted[p].view();
        lane_fifo_[p].insert(lane_fifo_[p].end(), v.begin(), v.end());
    }
    const unsigned quota = config_.octets_per_lane_clock();
    const auto ready_lanes = std::count_if(lane_fifo_.begin(), lane_fifo_.end(),
                                           [quota](const Bytes& f) { return f.size() >= quota; });
    if (ready_lanes == static_cast<long>(config_.lanes)) {
        std::array<Octet, kBusOctets> raw{};
        std::array<unsigned, 4> taken{};
        for (unsigned pos = 0; pos < kBusOctets; ++pos) {
            const unsigned lane = config_.position_lane[pos];
            raw[pos] = lane_fifo_[lane][taken[lane]++];
        }
        for (unsigned p = 0; p < config_.lanes; ++p) {
            lane_fifo_[p].erase(lane_fifo_[p].begin(), lane_fifo_[p].begin() + quota);
        }
        const auto word = pack_bus_word(raw, config_.design);
        if (words_ == 0) first_word_clock_ = clock_;
        ++words_;
        ready_.push_back({word.octets, clock_});
    } else if (ready_lanes > 0) {
        ++stalls_;
    }
    ++clock_;
}

void ParallelEngine::run_sequential(std::size_t target) {
    std::vector<Emission> emitted(config_.lanes);
    while (buffered() < target) {
        for (unsigned lane : schedule_.order) step_lane(lane, emitted[lane]);
        pack_clock(emitted);
    }
}

void ParallelEngine::run_threaded(std::size_t target) {
    std::vector<Emission> emitted(config_.lanes);
    std::atomic<bool> stop = buffered() >= target;
    if (stop) return;

    auto on_clock = [&]() noexcept {
        pack_clock(emitted);
        if (buffered() >= target) stop = true;
    };
    std::barrier sync(static_cast<std::ptrdiff_t>(config_.lanes), on_clock);

    std::vector<std::jthread> workers;
    workers.reserve(config_.lanes);
    for (unsigned lane : schedule_.order) {
        workers.emplace_back([&, lane] {
            while (!stop) {
                step_lane(lane, emitted[lane]);
                sync.arrive_and_wait();
            }
        });
    }
}

void ParallelEngine::finish_ksa() {
    std::vector<Emission> emitted(config_.lanes);
    auto started = [this] {
        return std::all_of(lanes_.begin(), lanes_.end(),
                           [](const hwsim::Engine& e) { return e.state().prga_start_clock.has_value(); });
    };
    while (!started()) {
        for (unsigned lane : schedule_.order) step_lane(lane, emitted[lane]);
        pack_clock(emitted);
    }
}

void ParallelEngine::generate(std::span<Octet> out) {
    const std::size_t need = out.size() > buffered() ? out.size() - buffered() : 0;
    if (need > 0) {
        const std::size_t target = buffered() + need;
        schedule_.threaded ? run_threaded(target) : run_sequential(target);
    }
    for (auto& o : out) {
        const auto& w = ready_[ready_word_];
        o = w.octets[ready_offset_];
        last_delivery_clock_ = w.clock;
        if (++ready_offset_ == kBusOctets) {
            ready_offset_ = 0;
            ++ready_word_;
        }
    }
    if (ready_word_ == ready_.size()) {
        ready_.clear();
        ready_word_ = 0;
    }
    delivered_ += out.size();
}

Bytes ParallelEngine::generate(std::size_t n) {
    Bytes out(n);
    generate(std::span<Octet>(out));
    return out;
}

CycleReport ParallelEngine::report() const {
    CycleReport r;
    r.design = config_.design;
    r.bytes = delivered_;
    r.stalls = stalls_;
    // Lanes are clocked in lockstep, so the lane lead-in is shared.
    std::uint64_t ksa = 0;
    for (const auto& lane : lanes_) {
        const auto start = lane.state().prga_start_clock;
        ksa = std::max(ksa, start ? *start : lane.state().clock());
    }
    r.ksa_clocks = ksa;
    if (delivered_ > 0) r.prga_clocks = last_delivery_clock_ + 1 - ksa;
    return r;
}

hwsim::SimResult simulate_parallel(Design design, const SecretKey& key, std::size_t n, LaneSchedule schedule) {
    ParallelEngine engine(design, key, std::move(schedule));
    engine.finish_ksa();
    hwsim::SimResult res;
    res.keystream = engine.generate(n);
    res.report = engine.report();
    return res;
}

}  // namespace rc4sim::parallel
