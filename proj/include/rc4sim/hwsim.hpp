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
 * @file hwsim.hpp
 * @brief Half-cycle simulator of the single-engine RC4 designs (1 to 4).
 *
 * Every clock is split into a rising and a falling edge, rising first.
 * Falling edges load latches from the S-box register bank; rising edges
 * commit register writes and drive keystream outputs. The StorageBlock
 * enforces that split and throws InvariantViolation on any breach.
 *
 * Design 1: separate KSA and PRGA units, one byte per clock.
 * Design 2: design 1 with a single datapath switched by prga_en.
 * Design 3: two-iteration unrolled datapath, two bytes per clock.
 * Design 4: design 3 with a single datapath switched by prga_en.
 *
 * Trace format (one line per half cycle):
 *
 *     <clock>.<r|f> <action>[; <action>...]
 *
 * where clock counts from 0 at the KSA initialisation clock.
 */

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rc4sim/rc4_ref.hpp"
#include "rc4sim/unroll.hpp"

namespace rc4sim {

enum class Design : std::uint8_t { D1 = 1, D2 = 2, D3 = 3, D4 = 4, D5 = 5, D6 = 6 };

/// Throws InvalidInput for anything outside 1..6.
Design design_from_number(int number);
constexpr int design_number(Design d) noexcept { return static_cast<int>(d); }
std::string_view design_name(Design d) noexcept;

constexpr bool is_unrolled(Design d) noexcept { return d == Design::D3 || d == Design::D4 || d == Design::D6; }
constexpr bool is_dynamic(Design d) noexcept { return d != Design::D1 && d != Design::D3; }
constexpr bool is_parallel(Design d) noexcept { return d == Design::D5 || d == Design::D6; }
/// Canonical RC4 keystream (designs 1-4) versus lane-split parallel RC4.
constexpr bool is_canonical_rc4(Design d) noexcept { return !is_parallel(d); }
/// Steady-state keystream octets per clock.
constexpr unsigned bytes_per_clock(Design d) noexcept {
    return is_parallel(d) ? 4u : (is_unrolled(d) ? 2u : 1u);
}

/// Design 5/6 requested from the single-engine simulator.
class UnsupportedDesign : public InvalidInput {
  public:
    using InvalidInput::InvalidInput;
};

/// An operation was invoked in a state its contract does not allow.
class PreconditionError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Non-negative fraction kept in lowest terms.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Rational reduced(std::uint64_t num, std::uint64_t den);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Clock accounting for one run.
struct CycleReport {
    Design design = Design::D1;
    std::uint64_t ksa_clocks = 0;
    std::uint64_t prga_clocks = 0;
    std::uint64_t bytes = 0;
    /// Bus-word stalls (parallel designs only).
    std::uint64_t stalls = 0;

    std::uint64_t total_clocks() const noexcept { return ksa_clocks + prga_clocks; }
    /// (ksa + prga) / n; empty when no bytes were produced.
    std::optional<Rational> per_byte() const;

    friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

/**
 * Closed-form clock counts.
 *
 *   designs 1, 2: 257 + (2 + n)
 *   designs 3, 4: 129 + (2 + ceil(n/2))
 *   design 5:     257 + (2 + ceil(n/4))
 *   design 6:     129 + (2 + ceil(n/4))
 *
 * n = 0 reports the KSA alone.
 */
CycleReport cycles_formula(Design design, std::uint64_t n);

/// Human-readable form of the closed form, e.g. "129+(2+n/2)".
std::string_view cycles_formula_text(Design design) noexcept;

namespace hwsim {

enum class Edge : std::uint8_t { Rising, Falling };
enum class Phase : std::uint8_t { KsaInit, Ksa, PrgaInit, Prga, Done };

std::string_view phase_name(Phase p) noexcept;

/**
 * S-box register bank plus the edge it is currently being clocked on.
 * Reads model the falling-edge D flip-flop latch; writes model the
 * rising-edge DEMUX write-back.
 */
class StorageBlock {
  public:
    Octet read(Octet address);
    void write(Octet address, Octet value);
    /// Rising-edge load of the identity permutation.
    void reset_identity();

    void set_edge(Edge e) noexcept { edge_ = e; }
    Edge edge() const noexcept { return edge_; }

    /// Observer view; bypasses the edge check.
    const SBox& contents() const noexcept { return regs_; }

    std::uint64_t reads() const noexcept { return reads_; }
    std::uint64_t writes() const noexcept { return writes_; }

  private:
    SBox regs_;
    Edge edge_ = Edge::Rising;
    std::uint64_t reads_ = 0;
    std::uint64_t writes_ = 0;
};

/// Values captured on a falling edge for commit on the next rising edge.
struct ReadLatches {
    bool valid = false;
    unroll::UnrolledIndices idx;  // 1-byte designs use i1/j1 only
    unroll::SwapOperands s0{};    // 1-byte designs use s_i1/s_j1 only
    unroll::SwapCase swap_case = unroll::SwapCase::AllDistinct;
    Octet z1 = 0;                 // unrolled PRGA: S1[S0[i1] + S0[j1]]
    Octet z2_address = 0;         // unrolled PRGA: S1[i2] + S1[j2]
};

/// Architectural state of one engine.
struct EngineState {
    Design design;
    SecretKey key;
    StorageBlock sbox;
    Octet i = 0;
    Octet j = 0;
    bool prga_en = false;
    Phase phase = Phase::KsaInit;
    /// Half clock periods already simulated; even values are rising edges.
    std::uint64_t half_cycle = 0;

    ReadLatches latch;

    // Z pipeline: address registered on the commit edge, read on the
    // following falling edge, driven out on the rising edge after that.
    bool z_address_valid = false;
    Octet z_address = 0;
    Octet z1_reg = 0;
    bool z_out_valid = false;
    std::array<Octet, 2> z_out{};

    /// KSA iterations committed (pairs of iterations for unrolled designs).
    std::uint32_t ksa_steps = 0;
    std::uint64_t prga_steps = 0;
    /// Clock on which the PRGA initialisation happened.
    std::optional<std::uint64_t> prga_start_clock;

    EngineState(Design d, const SecretKey& k);

    std::uint64_t clock() const noexcept { return half_cycle / 2; }
    Edge next_edge() const noexcept { return half_cycle % 2 == 0 ? Edge::Rising : Edge::Falling; }
    bool ksa_complete() const noexcept;
};

/// Keystream octets driven on one edge (0, 1 or 2).
struct Emission {
    std::array<Octet, 2> octets{};
    std::uint8_t count = 0;

    std::span<const Octet> view() const noexcept { return {octets.data(), count}; }
};

class TraceSink {
  public:
    virtual ~TraceSink() = default;
    virtual void record(std::uint64_t clock, Edge edge, std::string_view actions) = 0;
};

/// Writes trace lines to a stream.
class StreamTrace final : public TraceSink {
  public:
    explicit StreamTrace(std::ostream& os) : os_(os) {}
    void record(std::uint64_t clock, Edge edge, std::string_view actions) override;

  private:
    std::ostream& os_;
};

class MemoryTrace final : public TraceSink {
  public:
    void record(std::uint64_t clock, Edge edge, std::string_view actions) override;
    const std::vector<std::string>& lines() const noexcept { return lines_; }

  private:
    std::vector<std::string> lines_;
};

std::string format_trace_line(std::uint64_t clock, Edge edge, std::string_view actions);

struct StepOptions {
    TraceSink* trace = nullptr;
    /// Verify the S-box is a permutation after every rising edge (slow).
    bool check_permutation = false;
};

/**
 * Advances @p state by one half cycle. Throws PreconditionError when the
 * engine is Done and UnsupportedDesign for designs 5/6.
 */
Emission step_half_cycle(EngineState& state, const StepOptions& options = {});

/**
 * The prga_en switch of the dynamic designs, applied on the clock after the
 * last KSA commit: counter and j cleared, key addend gated to zero, no swap.
 * Throws PreconditionError before KSA completion or for designs 1/3/5/6.
 */
void dynamic_mode_switch(EngineState& state);

/**
 * Pull-style wrapper around step_half_cycle. Odd requests on the unrolled
 * designs keep the spare octet for the next call.
 */
class Engine {
  public:
    Engine(Design design, const SecretKey& key, StepOptions options = {});

    Emission step();
    /// Runs until the PRGA initialisation clock is reached.
    void finish_ksa();
    void generate(std::span<Octet> out);
    Bytes generate(std::size_t n);
    /// Stops the engine; later steps throw PreconditionError.
    void halt() noexcept { state_.phase = Phase::Done; }

    /// Clocks needed to deliver the octets handed out so far.
    CycleReport report() const;
    const EngineState& state() const noexcept { return state_; }
    Design design() const noexcept { return state_.design; }

  private:
    EngineState state_;
    StepOptions options_;
    std::array<Octet, 2> spare_{};
    std::uint8_t spare_count_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t last_delivery_clock_ = 0;
};

struct SimResult {
    Bytes keystream;
    CycleReport report;
};

/// Full run: KSA, then n keystream octets. Designs 1-4 only.
SimResult simulate(Design design, const SecretKey& key, std::size_t n, const StepOptions& options = {});

}  // namespace hwsim
}  // namespace rc4sim
