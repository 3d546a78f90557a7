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

#include <random>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "rc4sim/hwsim.hpp"

using namespace rc4sim;
using namespace rc4sim::hwsim;

namespace {

constexpr Design kSingle[] = {Design::D1, Design::D2, Design::D3, Design::D4};

// Steps until the next edge is the rising edge of the PRGA initialisation clock.
EngineState run_to_switch(Design d, const SecretKey& key) {
    EngineState st(d, key);
    while (!(st.phase == Phase::PrgaInit && st.next_edge() == Edge::Rising)) step_half_cycle(st);
    return st;
}

}  // namespace

TEST_CASE("closed-form clock counts") {
    CHECK(cycles_formula(Design::D1, 16).ksa_clocks == 257);
    CHECK(cycles_formula(Design::D1, 16).prga_clocks == 18);
    CHECK(cycles_formula(Design::D3, 16).total_clocks() == 139);
    CHECK(cycles_formula(Design::D2, 1).total_clocks() == 260);
    CHECK(cycles_formula(Design::D3, 5).prga_clocks == 5);
    CHECK(cycles_formula(Design::D1, 0).prga_clocks == 0);
    CHECK_FALSE(cycles_formula(Design::D1, 0).per_byte().has_value());
    CHECK(cycles_formula(Design::D3, 262144).per_byte()->value() == doctest::Approx(0.5005).epsilon(1e-4));
    CHECK(cycles_formula(Design::D1, 1u << 20).per_byte()->value() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cycles_formula(Design::D1, 256).per_byte()->str() == "515/256");
    CHECK(cycles_formula(Design::D3, 256).per_byte() == Rational::reduced(259, 256));
}

TEST_CASE("measured clocks match the closed forms") {
    const auto key = SecretKey::from_ascii("cycle-check");
    for (const auto d : kSingle) {
        for (std::uint64_t n : {0u, 1u, 2u, 3u, 16u, 17u, 255u, 1024u}) {
            CAPTURE(design_number(d));
            CAPTURE(n);
            CHECK(simulate(d, key, n).report == cycles_formula(d, n));
        }
    }
    CHECK(simulate(Design::D1, key, 16).report.prga_clocks == 18);
    CHECK(simulate(Design::D3, key, 16).report.total_clocks() == 139);
}

TEST_CASE("keystream equals the oracle for every single-engine design") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t lens[] = {1, 5, 16, 40, 256};
        const auto raw = oracle::random_bytes(rng, lens[trial % 5]);
        const std::size_t n = rng() % 600;
        const auto expected = oracle::rc4_keystream(raw, n);
        for (const auto d : kSingle) {
            CAPTURE(design_number(d));
            REQUIRE(simulate(d, SecretKey(raw), n).keystream == expected);
        }
    }
}

TEST_CASE("permutation holds on every rising edge") {
    StepOptions opts;
    opts.check_permutation = true;
    for (const auto d : kSingle) CHECK_NOTHROW(simulate(d, SecretKey::from_ascii("perm"), 300, opts));
}

TEST_CASE("chunked generation matches one-shot generation") {
    const auto key = SecretKey::from_ascii("chunks");
    for (const auto d : kSingle) {
        const auto whole = simulate(d, key, 500).keystream;
        Engine e(d, key);
        Bytes pieces;
        std::size_t sizes[] = {1, 3, 2, 7, 0, 5, 11};
        std::size_t k = 0;
        while (pieces.size() < whole.size()) {
            const auto take = std::min(sizes[k++ % 7], whole.size() - pieces.size());
            const auto part = e.generate(take);
            pieces.insert(pieces.end(), part.begin(), part.end());
        }
        CHECK(pieces == whole);
        CHECK(e.report() == cycles_formula(d, 500));
    }
}

TEST_CASE("first PRGA clock of design 1") {
    const auto key = SecretKey::from_ascii("Key");
    EngineState st(Design::D1, key);
    Bytes got;
    std::optional<std::uint64_t> first_emit;
    while (got.size() < 2) {
        const auto clock = st.clock();
        const auto edge = st.next_edge();
        const auto e = step_half_cycle(st);
        if (e.count > 0) {
            CHECK(edge == Edge::Rising);
            if (!first_emit) first_emit = clock;
        }
        for (auto z : e.view()) got.push_back(z);
        if (clock == 257 && edge == Edge::Falling) {
            // Counter leaves reset at 1 and nothing has been emitted yet.
            CHECK(st.i == 1);
            CHECK(got.empty());
        }
    }
    CHECK(*first_emit == 259);
    CHECK(got == oracle::rc4_keystream(oracle::from_text("Key"), 2));
}

TEST_CASE("design 3 emits two octets together") {
    EngineState st(Design::D3, SecretKey::from_ascii("Key"));
    Emission e;
    while (e.count == 0) e = step_half_cycle(st);
    CHECK(e.count == 2);
    CHECK(st.clock() == 131);
    const auto expect = oracle::rc4_keystream(oracle::from_text("Key"), 2);
    CHECK(e.octets[0] == expect[0]);
    CHECK(e.octets[1] == expect[1]);
}

TEST_CASE("dynamic mode switch") {
    const auto key = SecretKey::from_ascii("switch");

    SUBCASE("design 2 at clock 257") {
        auto st = run_to_switch(Design::D2, key);
        CHECK(st.clock() == 257);
        CHECK(st.sbox.contents() == ksa_reference(key));
        auto copy = st;
        dynamic_mode_switch(copy);
        CHECK(copy.i == 0);
        CHECK(copy.j == 0);
        CHECK(copy.prga_en);
        CHECK(copy.sbox.contents() == ksa_reference(key));
        CHECK_THROWS_AS(dynamic_mode_switch(copy), PreconditionError);

        // The simulator applies the same switch on its own and does not swap.
        const auto writes = st.sbox.writes();
        step_half_cycle(st);
        CHECK(st.prga_en);
        CHECK(st.i == 0);
        CHECK(st.j == 0);
        CHECK(st.sbox.writes() == writes);
    }

    SUBCASE("design 4 at clock 129") {
        auto st = run_to_switch(Design::D4, key);
        CHECK(st.clock() == 129);
        CHECK(st.sbox.contents() == ksa_reference(key));
        const auto writes = st.sbox.writes();
        step_half_cycle(st);
        CHECK(st.prga_en);
        CHECK(st.i == 0);
        CHECK(st.j == 0);
        CHECK(st.sbox.writes() == writes);
    }

    SUBCASE("preconditions") {
        EngineState early(Design::D2, key);
        for (int k = 0; k < 20; ++k) step_half_cycle(early);
        CHECK_THROWS_AS(dynamic_mode_switch(early), PreconditionError);
        auto d1 = run_to_switch(Design::D1, key);
        CHECK_THROWS_AS(dynamic_mode_switch(d1), PreconditionError);
        auto d3 = run_to_switch(Design::D3, key);
        CHECK_THROWS_AS(dynamic_mode_switch(d3), PreconditionError);
    }
}

TEST_CASE("dynamic designs equal their static counterparts") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const auto raw = oracle::random_bytes(rng, 1 + rng() % 256);
        const std::size_t n = rng() % 400;
        const SecretKey key(raw);
        CHECK(simulate(Design::D2, key, n).keystream == simulate(Design::D1, key, n).keystream);
        CHECK(simulate(Design::D4, key, n).keystream == simulate(Design::D3, key, n).keystream);
    }
}

TEST_CASE("edge discipline of the storage block") {
    StorageBlock sb;
    sb.set_edge(Edge::Rising);
    CHECK_THROWS_AS(sb.read(3), InvariantViolation);
    CHECK_NOTHROW(sb.write(3, 9));
    CHECK_NOTHROW(sb.reset_identity());
    sb.set_edge(Edge::Falling);
    CHECK_THROWS_AS(sb.write(3, 9), InvariantViolation);
    CHECK_THROWS_AS(sb.reset_identity(), InvariantViolation);
    CHECK(sb.read(3) == 3);
    CHECK(sb.reads() == 1);
}

TEST_CASE("trace lines") {
    const auto key = SecretKey::from_ascii("Key");

    SUBCASE("design 1") {
        MemoryTrace trace;
        StepOptions opts;
        opts.trace = &trace;
        simulate(Design::D1, key, 2, opts);
        const auto& l = trace.lines();
        REQUIRE(l.size() > 520);
        CHECK(l[0] == "0.r init S=identity i=0 j=0");
        CHECK(l[1] == "0.f ksa_unit; latch i=0 j=75 S[i]=0 S[j]=75");
        CHECK(l[2] == "1.r swap S[0]<->S[75] j=75");
        CHECK(l[513] == "256.f ksa done");
        CHECK(l[514] == "257.r prga_unit start i=0 j=0");
        CHECK(l[518] == "259.r emit Z=235; swap S[2]<->S[183] j=183");
    }

    SUBCASE("design 4") {
        MemoryTrace trace;
        StepOptions opts;
        opts.trace = &trace;
        simulate(Design::D4, key, 2, opts);
        const auto& l = trace.lines();
        CHECK(l[1] == "0.f dkp prga_en=0; latch i1=0 i2=1 j1=75 j2=177 case=1");
        CHECK(l[258] == "129.r prga_en=1 counter=0 j=0 swap=off");
        CHECK(l[262] == "131.r emit Z=235,159; double_swap case=1 writes=4 j=20");
    }

    CHECK(format_trace_line(12, Edge::Falling, "") == "12.f idle");
    std::ostringstream os;
    StreamTrace st(os);
    st.record(3, Edge::Rising, "x");
    CHECK(os.str() == "3.r x\n");
}

TEST_CASE("unsupported designs and halted engines") {
    const auto key = SecretKey::from_ascii("abcdef");
    CHECK_THROWS_AS(EngineState(Design::D5, key), UnsupportedDesign);
    CHECK_THROWS_AS(simulate(Design::D6, key, 4), UnsupportedDesign);
    CHECK_THROWS_AS(design_from_number(0), InvalidInput);
    CHECK_THROWS_AS(design_from_number(7), InvalidInput);
    Engine e(Design::D1, key);
    e.halt();
    CHECK_THROWS_AS(e.step(), PreconditionError);
}
