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

#include "rc4sim/hwsim.hpp"

#include <numeric>
#include <ostream>
#include <sstream>
#include <type_traits>

namespace rc4sim {

namespace {

constexpr std::uint32_t kKsaIterations = 256;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

Design design_from_number(int number) {
    if (number < 1 || number > 6) throw InvalidInput("design must be 1..6, got " + std::to_string(number));
    return static_cast<Design>(number);
}

std::string_view design_name(Design d) noexcept {
    switch (d) {
        case Design::D1: return "1-byte/clock";
        case Design::D2: return "1-byte/clock dynamic KSA-PRGA";
        case Design::D3: return "2-byte/clock unrolled";
        case Design::D4: return "2-byte/clock unrolled dynamic KSA-PRGA";
        case Design::D5: return "4 lanes of design 2 (parallel-RC4)";
        case Design::D6: return "2 lanes of design 4 (parallel-RC4)";
    }
    return "?";
}

Rational Rational::reduced(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw InvalidInput("rational with zero denominator");
    const auto g = std::gcd(num, den);
    return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::optional<Rational> CycleReport::per_byte() const {
    if (bytes == 0) return std::nullopt;
    return Rational::reduced(total_clocks(), bytes);
}

CycleReport cycles_formula(Design design, std::uint64_t n) {
    CycleReport r;
    r.design = design;
    r.bytes = n;
    r.ksa_clocks = 1 + (is_unrolled(design) ? kKsaIterations / 2 : kKsaIterations);
    if (n > 0) r.prga_clocks = 2 + ceil_div(n, bytes_per_clock(design));
    return r;
}

std::string_view cycles_formula_text(Design design) noexcept {
    switch (design) {
        case Design::D1:
        case Design::D2: return "257+(2+n)";
        case Design::D3:
        case Design::D4: return "129+(2+n/2)";
        case Design::D5: return "257+(2+n/4)";
        case Design::D6: return "129+(2+n/4)";
    }
    return "?";
}

namespace hwsim {

std::string_view phase_name(Phase p) noexcept {
    switch (p) {
        case Phase::KsaInit: return "ksa_init";
        case Phase::Ksa: return "ksa";
        case Phase::PrgaInit: return "prga_init";
        case Phase::Prga: return "prga";
        case Phase::Done: return "done";
    }
    return "?";
}

Octet StorageBlock::read(Octet address) {
    if (edge_ != Edge::Falling) {
        throw InvariantViolation("latch load from S[" + std::to_string(address) + "] on a rising edge");
    }
    ++reads_;
    return regs_[address];
}

void StorageBlock::write(Octet address, Octet value) {
    if (edge_ != Edge::Rising) {
        throw InvariantViolation("S-box write to S[" + std::to_string(address) + "] on a falling edge");
    }
    ++writes_;
    regs_[address] = value;
}

void StorageBlock::reset_identity() {
    if (edge_ != Edge::Rising) throw InvariantViolation("S-box initialisation on a falling edge");
    regs_ = SBox{};
    writes_ += SBox::kSize;
}

EngineState::EngineState(Design d, const SecretKey& k) : design(d), key(k) {
    if (is_parallel(d)) {
        throw UnsupportedDesign("design " + std::to_string(design_number(d)) +
                                " is a multi-lane composition; use the parallel simulator");
    }
}

bool EngineState::ksa_complete() const noexcept {
    return ksa_steps == (is_unrolled(design) ? kKsaIterations / 2 : kKsaIterations);
}

std::string format_trace_line(std::uint64_t clock, Edge edge, std::string_view actions) {
    std::string line = std::to_string(clock);
    line += edge == Edge::Rising ? ".r " : ".f ";
    line += actions.empty() ? std::string_view("idle") : actions;
    return line;
}

void StreamTrace::record(std::uint64_t clock, Edge edge, std::string_view actions) {
    os_ << format_trace_line(clock, edge, actions) << '\n';
}

void MemoryTrace::record(std::uint64_t clock, Edge edge, std::string_view actions) {
    lines_.push_back(format_trace_line(clock, edge, actions));
}

namespace {

/// Collects "; "-separated action text only when tracing is on.
class ActionLog {
  public:
    explicit ActionLog(bool enabled) : enabled_(enabled) {}

    template <class... Parts>
    void add(const Parts&... parts) {
        if (!enabled_) return;
        if (!text_.empty()) text_ += "; ";
        std::ostringstream os;
        (os << ... << widen(parts));
        text_ += os.str();
    }

    const std::string& text() const noexcept { return text_; }

  private:
    template <class T>
    static auto widen(const T& v) {
        if constexpr (std::is_same_v<T, Octet>) {
            return static_cast<unsigned>(v);
        } else {
            return v;
        }
    }

    bool enabled_;
    std::string text_;
};

// ---------------------------------------------------------------------------
// 1-byte datapath (designs 1 and 2)
// ---------------------------------------------------------------------------

/// Falling edge: S[i] and S[j + S[i] + addend] into the D flip-flops.
void latch_single(EngineState& st, Octet key_addend, ActionLog& log) {
    auto& l = st.latch;
    l.idx.i1 = st.i;
    l.s0.s_i1 = st.sbox.read(st.i);
    l.idx.j1 = static_cast<Octet>(st.j + l.s0.s_i1 + key_addend);
    l.s0.s_j1 = st.sbox.read(l.idx.j1);
    l.valid = true;
    log.add("latch i=", l.idx.i1, " j=", l.idx.j1, " S[i]=", l.s0.s_i1, " S[j]=", l.s0.s_j1);
}

/// Rising edge: cross-coupled write-back of the latched pair.
void commit_single(EngineState& st, ActionLog& log) {
    auto& l = st.latch;
    st.sbox.write(l.idx.i1, l.s0.s_j1);
    st.sbox.write(l.idx.j1, l.s0.s_i1);
    st.j = l.idx.j1;
    l.valid = false;
    log.add("swap S[", l.idx.i1, "]<->S[", l.idx.j1, "] j=", st.j);
}

// Design 1: the KSA unit runs a single-round counter, then hands the
// register bank to a separate PRGA unit whose counter starts at 1.

void ksa_unit_latch(EngineState& st, ActionLog& log) {
    log.add("ksa_unit");
    latch_single(st, st.key.at(st.i), log);
}

void prga_unit_start(EngineState& st, ActionLog& log) {
    st.i = 0;
    st.j = 0;
    st.prga_en = true;
    log.add("prga_unit start i=0 j=0");
}

void prga_unit_latch(EngineState& st, ActionLog& log) {
    latch_single(st, 0, log);
}

// Design 2: one datapath; prga_en selects the key addend through a 2:1 mux
// and enables the Z adder.

Octet dkp_key_addend(const EngineState& st, Octet i1) {
    return st.prga_en ? Octet{0} : st.key.at(i1);
}

void dkp_latch(EngineState& st, ActionLog& log) {
    log.add("dkp prga_en=", st.prga_en ? 1 : 0);
    latch_single(st, dkp_key_addend(st, st.i), log);
}

// ---------------------------------------------------------------------------
// 2-byte unrolled datapath (designs 3 and 4)
// ---------------------------------------------------------------------------

void latch_pair(EngineState& st, Octet key_i1, Octet key_i2, ActionLog& log) {
    auto& l = st.latch;
    auto& s = st.sbox;
    l.idx.i1 = st.i;
    l.idx.i2 = static_cast<Octet>(st.i + 1);
    l.s0.s_i1 = s.read(l.idx.i1);
    l.s0.s_i2 = s.read(l.idx.i2);
    l.idx.j1 = static_cast<Octet>(st.j + l.s0.s_i1 + key_i1);
    l.s0.s_j1 = s.read(l.idx.j1);
    l.idx.j2 = unroll::compute_j2_ksa(st.j, l.s0.s_i1, l.s0.s_i2, key_i1, key_i2, l.idx.i2 == l.idx.j1);
    l.s0.s_j2 = s.read(l.idx.j2);
    l.swap_case = unroll::classify_swap(l.idx);
    l.valid = true;
    log.add("latch i1=", l.idx.i1, " i2=", l.idx.i2, " j1=", l.idx.j1, " j2=", l.idx.j2,
            " case=", unroll::case_number(l.swap_case));
}

/// Z1 address and value plus the Z2 address, all taken from S0.
void latch_pair_outputs(EngineState& st, ActionLog& log) {
    auto& l = st.latch;
    const auto t1 = static_cast<Octet>(l.s0.s_i1 + l.s0.s_j1);
    if (t1 == l.idx.i1) {
        l.z1 = l.s0.s_j1;
    } else if (t1 == l.idx.j1) {
        l.z1 = l.s0.s_i1;
    } else {
        l.z1 = st.sbox.read(t1);
    }
    const auto ops = unroll::select_z2_operands(l.swap_case, l.s0);
    l.z2_address = static_cast<Octet>(ops.s1_i2 + ops.s1_j2);
    log.add("z1=", l.z1, " z2_addr=", l.z2_address);
}

void commit_pair(EngineState& st, ActionLog& log) {
    auto& l = st.latch;
    const auto moves = unroll::double_swap_moves(l.swap_case, l.idx, l.s0);
    for (std::uint8_t k = 0; k < moves.count; ++k) st.sbox.write(moves.writes[k].address, moves.writes[k].value);
    st.j = l.idx.j2;
    l.valid = false;
    log.add("double_swap case=", unroll::case_number(l.swap_case), " writes=", static_cast<unsigned>(moves.count),
            " j=", st.j);
}

void latch_pair_ksa(EngineState& st, ActionLog& log) {
    const Octet k1 = st.key.at(st.i);
    const Octet k2 = st.key.at(static_cast<Octet>(st.i + 1));
    if (st.design == Design::D4) {
        log.add("dkp prga_en=0");
    } else {
        log.add("ksa_unit");
    }
    latch_pair(st, k1, k2, log);
}

void latch_pair_prga(EngineState& st, ActionLog& log) {
    if (st.design == Design::D4) {
        // Key-sum mux forwards 0 once prga_en is high.
        const Octet k1 = st.prga_en ? Octet{0} : st.key.at(st.i);
        const Octet k2 = st.prga_en ? Octet{0} : st.key.at(static_cast<Octet>(st.i + 1));
        log.add("dkp prga_en=", st.prga_en ? 1 : 0);
        latch_pair(st, k1, k2, log);
    } else {
        latch_pair(st, 0, 0, log);
    }
    latch_pair_outputs(st, log);
}

// ---------------------------------------------------------------------------
// Edge handlers
// ---------------------------------------------------------------------------

void enter_prga(EngineState& st, ActionLog& log) {
    st.prga_start_clock = st.clock();
    if (is_dynamic(st.design)) {
        dynamic_mode_switch(st);
        log.add("prga_en=1 counter=0 j=0 swap=off");
    } else {
        prga_unit_start(st, log);
    }
}

Emission drive_outputs(EngineState& st, ActionLog& log) {
    Emission e;
    if (!st.z_out_valid) return e;
    if (is_unrolled(st.design)) {
        e.octets = st.z_out;
        e.count = 2;
        log.add("emit Z=", st.z_out[0], ",", st.z_out[1]);
    } else {
        e.octets[0] = st.z_out[0];
        e.count = 1;
        log.add("emit Z=", st.z_out[0]);
    }
    st.z_out_valid = false;
    return e;
}

Emission rising_edge(EngineState& st, ActionLog& log) {
    const bool unrolled = is_unrolled(st.design);
    Emission out;
    switch (st.phase) {
        case Phase::KsaInit:
            st.sbox.reset_identity();
            st.i = 0;
            st.j = 0;
            log.add("init S=identity i=0 j=0");
            break;
        case Phase::Ksa:
            if (st.latch.valid) {
                unrolled ? commit_pair(st, log) : commit_single(st, log);
                ++st.ksa_steps;
            }
            break;
        case Phase::PrgaInit:
            enter_prga(st, log);
            break;
        case Phase::Prga:
            out = drive_outputs(st, log);
            if (st.latch.valid) {
                if (unrolled) {
                    st.z1_reg = st.latch.z1;
                    st.z_address = st.latch.z2_address;
                    commit_pair(st, log);
                } else {
                    st.z_address = static_cast<Octet>(st.latch.s0.s_i1 + st.latch.s0.s_j1);
                    commit_single(st, log);
                }
                st.z_address_valid = true;
                ++st.prga_steps;
            }
            break;
        case Phase::Done:
            break;
    }
    return out;
}

void falling_edge(EngineState& st, ActionLog& log) {
    const bool unrolled = is_unrolled(st.design);
    const Octet stride = unrolled ? 2 : 1;
    switch (st.phase) {
        case Phase::KsaInit:
            st.phase = Phase::Ksa;
            if (unrolled) {
                latch_pair_ksa(st, log);
            } else if (st.design == Design::D2) {
                dkp_latch(st, log);
            } else {
                ksa_unit_latch(st, log);
            }
            break;
        case Phase::Ksa:
            if (st.ksa_complete()) {
                st.phase = Phase::PrgaInit;
                log.add("ksa done");
                break;
            }
            st.i = static_cast<Octet>(st.i + stride);
            if (unrolled) {
                latch_pair_ksa(st, log);
            } else if (st.design == Design::D2) {
                dkp_latch(st, log);
            } else {
                ksa_unit_latch(st, log);
            }
            break;
        case Phase::PrgaInit:
        case Phase::Prga:
            if (st.phase == Phase::PrgaInit) {
                // Counter leaves its reset value; the unrolled counter then
                // produces i1 = 1, 3, 5, ... and i2 = i1 + 1.
                st.phase = Phase::Prga;
                st.i = 1;
            } else {
                st.i = static_cast<Octet>(st.i + stride);
            }
            if (st.z_address_valid) {
                if (unrolled) {
                    st.z_out = {st.z1_reg, st.sbox.read(st.z_address)};
                } else {
                    st.z_out[0] = st.sbox.read(st.z_address);
                }
                st.z_out_valid = true;
                st.z_address_valid = false;
                log.add("z_latch addr=", st.z_address);
            }
            if (unrolled) {
                latch_pair_prga(st, log);
            } else if (st.design == Design::D2) {
                dkp_latch(st, log);
            } else {
                prga_unit_latch(st, log);
            }
            break;
        case Phase::Done:
            break;
    }
}

}  // namespace

void dynamic_mode_switch(EngineState& state) {
    if (!is_dynamic(state.design) || is_parallel(state.design)) {
        throw PreconditionError("dynamic_mode_switch applies to designs 2 and 4 only");
    }
    if (!state.ksa_complete()) {
        throw PreconditionError("dynamic_mode_switch before KSA completion (" + std::to_string(state.ksa_steps) +
                                " steps committed)");
    }
    if (state.prga_en) throw PreconditionError("prga_en is already latched high");
    state.i = 0;
    state.j = 0;
    state.prga_en = true;
    state.latch.valid = false;
}

Emission step_half_cycle(EngineState& state, const StepOptions& options) {
    if (state.phase == Phase::Done) throw PreconditionError("engine has stopped");

    const Edge edge = state.next_edge();
    const std::uint64_t clock = state.clock();
    state.sbox.set_edge(edge);
    ActionLog log(options.trace != nullptr);

    Emission out;
    if (edge == Edge::Rising) {
        out = rising_edge(state, log);
        if (options.check_permutation && !state.sbox.contents().is_permutation()) {
            throw InvariantViolation("S-box is not a permutation after rising edge of clock " +
                                     std::to_string(clock));
        }
    } else {
        falling_edge(state, log);
    }

    if (options.trace) options.trace->record(clock, edge, log.text());
    ++state.half_cycle;
    return out;
}

// ---------------------------------------------------------------------------

Engine::Engine(Design design, const SecretKey& key, StepOptions options)
    : state_(design, key), options_(options) {}

Emission Engine::step() { return step_half_cycle(state_, options_); }

void Engine::finish_ksa() {
    while (!state_.prga_start_clock) step();
}

void Engine::generate(std::span<Octet> out) {
    std::size_t filled = 0;
    while (filled < out.size() && spare_count_ > 0) {
        out[filled++] = spare_[0];
        spare_[0] = spare_[1];
        --spare_count_;
    }
    while (filled < out.size()) {
        const auto e = step();
        if (e.count == 0) continue;
        last_delivery_clock_ = state_.clock() - (state_.next_edge() == Edge::Rising ? 1 : 0);
        std::uint8_t k = 0;
        for (; k < e.count && filled < out.size(); ++k) out[filled++] = e.octets[k];
        for (; k < e.count; ++k) spare_[spare_count_++] = e.octets[k];
    }
    delivered_ += out.size();
}

Bytes Engine::generate(std::size_t n) {
    Bytes out(n);
    generate(std::span<Octet>(out));
    return out;
}

CycleReport Engine::report() const {
    CycleReport r;
    r.design = state_.design;
    r.bytes = delivered_;
    if (state_.prga_start_clock) {
        r.ksa_clocks = *state_.prga_start_clock;
        if (delivered_ > 0) r.prga_clocks = last_delivery_clock_ + 1 - *state_.prga_start_clock;
    } else {
        r.ksa_clocks = state_.clock();
    }
    return r;
}

SimResult simulate(Design design, const SecretKey& key, std::size_t n, const StepOptions& options) {
    Engine engine(design, key, options);
    engine.finish_ksa();
    SimResult res;
    res.keystream = engine.generate(n);
    engine.halt();
    res.report = engine.report();
    return res;
}

}  // namespace hwsim
}  // namespace rc4sim
