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

#include "doctest.h"
#include "rc4sim/unroll.hpp"

using namespace rc4sim;
using namespace rc4sim::unroll;

namespace {

SBox shuffled(std::mt19937_64& rng) {
    SBox s;
    for (unsigned k = 255; k > 0; --k) s.swap(static_cast<Octet>(k), static_cast<Octet>(rng() % (k + 1)));
    return s;
}

SBox two_swaps(SBox s, const UnrolledIndices& idx) {
    s.swap(idx.i1, idx.j1);
    s.swap(idx.i2, idx.j2);
    return s;
}

struct TwoSteps {
    Octet j1, j2, z1, z2;
    SBox after;
};

// Two plain PRGA iterations starting from counter i1-1 and accumulator j0.
TwoSteps prga_two_steps(SBox s, Octet i1, Octet j0) {
    TwoSteps r{};
    Octet i = i1;
    Octet j = static_cast<Octet>(j0 + s[i]);
    s.swap(i, j);
    r.j1 = j;
    r.z1 = s[static_cast<Octet>(s[i] + s[j])];
    i = static_cast<Octet>(i + 1);
    j = static_cast<Octet>(j + s[i]);
    s.swap(i, j);
    r.j2 = j;
    r.z2 = s[static_cast<Octet>(s[i] + s[j])];
    r.after = s;
    return r;
}

}  // namespace

TEST_CASE("classification examples") {
    CHECK(classify_swap(UnrolledIndices::from(0, 5, 9)) == SwapCase::AllDistinct);
    CHECK(classify_swap(UnrolledIndices::from(3, 4, 3)) == SwapCase::Crossed);
    CHECK(case_number(classify_swap(UnrolledIndices::from(3, 4, 3))) == 7);
    CHECK(classify_swap(UnrolledIndices::from(10, 11, 11)) == SwapCase::I2EqJ1EqJ2);
    CHECK(case_number(SwapCase::I2EqJ1EqJ2) == 6);
    CHECK(UnrolledIndices::from(255, 0, 0).i2 == 0);
}

TEST_CASE("case 8 cannot occur") {
    CHECK(case_from_predicates(true, true, true) == SwapCase::Impossible);
    // i2 == j1 and j2 == i1 force j1 == i2 != i1 == j2, so j2 == j1 is false.
    for (unsigned i1 = 0; i1 < 256; ++i1) {
        for (unsigned j1 = 0; j1 < 256; ++j1) {
            for (unsigned j2 = 0; j2 < 256; ++j2) {
                const auto idx = UnrolledIndices::from(static_cast<Octet>(i1), static_cast<Octet>(j1),
                                                       static_cast<Octet>(j2));
                if (classify_swap(idx) == SwapCase::Impossible) FAIL("case 8 reached");
            }
        }
    }
    UnrolledIndices bad{5, 9, 0, 0};
    CHECK_FALSE(bad.valid());
    CHECK_THROWS_AS(classify_swap(bad), InvariantViolation);
    CHECK_THROWS_AS(double_swap_moves(SwapCase::Impossible, UnrolledIndices::from(0, 1, 0), {}), InvariantViolation);
}

TEST_CASE("double swap data movement") {
    const SBox id;
    CHECK(apply_double_swap(id, UnrolledIndices::from(3, 4, 3)) == id);

    const auto r = apply_double_swap(id, UnrolledIndices::from(1, 1, 3));
    for (unsigned k = 0; k < 256; ++k) {
        const auto expected = k == 2 ? 3u : k == 3 ? 2u : k;
        REQUIRE(r[k] == expected);
    }

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = shuffled(rng);
        const auto i1 = static_cast<Octet>(rng());
        for (unsigned j1 = 0; j1 < 256; ++j1) {
            for (unsigned j2 = 0; j2 < 256; j2 += 1 + trial % 7) {
                const auto idx = UnrolledIndices::from(i1, static_cast<Octet>(j1), static_cast<Octet>(j2));
                REQUIRE(apply_double_swap(s, idx) == two_swaps(s, idx));
            }
        }
    }
}

TEST_CASE("case 7 makes no register writes") {
    const auto idx = UnrolledIndices::from(3, 4, 3);
    CHECK(double_swap_moves(SwapCase::Crossed, idx, {3, 4, 4, 3}).count == 0);
    CHECK(double_swap_moves(SwapCase::AllDistinct, UnrolledIndices::from(0, 5, 9), {0, 1, 5, 9}).count == 4);
}

TEST_CASE("j2 closed forms") {
    CHECK(compute_j2_ksa(0, 1, 2, 0, 0, false) == 3);
    CHECK(compute_j2_ksa(0, 0, 0, 0, 0, false) == 0);
    CHECK(compute_j2_ksa(250, 10, 10, 3, 5, true) == 22);
    CHECK(compute_j2_prga(0, 1, 2, false) == 3);
    CHECK(compute_j2_prga(0, 0, 0, true) == 0);
    CHECK(compute_j2_prga(1, 7, 99, true) == 15);
    static_assert(compute_j2_prga(0, 1, 2, false) == 3);
}

TEST_CASE("j2 for the key schedule matches two plain KSA steps") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20000; ++trial) {
        auto s = shuffled(rng);
        const auto i1 = static_cast<Octet>(rng());
        const auto i2 = static_cast<Octet>(i1 + 1);
        const auto j0 = static_cast<Octet>(rng());
        const auto k1 = static_cast<Octet>(rng());
        const auto k2 = static_cast<Octet>(rng());
        const auto s0 = s;
        const auto j1 = static_cast<Octet>(j0 + s[i1] + k1);
        s.swap(i1, j1);
        const auto j2 = static_cast<Octet>(j1 + s[i2] + k2);
        REQUIRE(compute_j2_ksa(j0, s0[i1], s0[i2], k1, k2, i2 == j1) == j2);
    }
}

TEST_CASE("Z1 and Z2 examples") {
    const SBox id;
    CHECK(compute_z1(id, UnrolledIndices::from(1, 1, 3)) == 2);

    const auto idx = UnrolledIndices::from(1, 1, compute_j2_prga(0, 1, 2, false));
    CHECK(idx.j2 == 3);
    CHECK(compute_z2(id, two_swaps(id, idx), idx) == 5);

    // Zero-sum index: S0[i1] = S0[j1] = 0 only when i1 = j1 holds the zero entry.
    SBox s;
    s.swap(0, 7);
    const auto zi = UnrolledIndices::from(7, 7, 40);
    auto s1 = s;
    s1.swap(7, 7);
    CHECK(compute_z1(s, zi) == s1[0]);

    const SwapOperands ops{11, 22, 33, 44};
    const auto row1 = select_z2_operands(SwapCase::AllDistinct, ops);
    CHECK(row1.s1_i2 == 22);
    CHECK(row1.s1_j2 == 44);
}

TEST_CASE("unrolled step matches two reference steps on random states") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100000; ++trial) {
        const auto s0 = shuffled(rng);
        const auto i1 = static_cast<Octet>(rng());
        const auto j0 = static_cast<Octet>(rng());
        const auto ref = prga_two_steps(s0, i1, j0);

        const auto j1 = static_cast<Octet>(j0 + s0[i1]);
        const auto i2 = static_cast<Octet>(i1 + 1);
        const auto j2 = compute_j2_prga(j0, s0[i1], s0[i2], i2 == j1);
        const auto idx = UnrolledIndices::from(i1, j1, j2);
        const auto s2 = apply_double_swap(s0, idx);

        REQUIRE(j1 == ref.j1);
        REQUIRE(j2 == ref.j2);
        REQUIRE(s2 == ref.after);
        REQUIRE(compute_z1(s0, idx) == ref.z1);
        REQUIRE(compute_z2(s0, s2, idx) == ref.z2);
    }
}
