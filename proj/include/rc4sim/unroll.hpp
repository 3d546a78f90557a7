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
 * @file unroll.hpp
 * @brief Combinational logic of the two-iteration unrolled datapath.
 *
 * Two consecutive RC4 iterations (i1, j1) and (i2, j2) with i2 = i1 + 1 are
 * fused into one clock. Naming of S-box snapshots: S0 is the box before
 * either swap, S1 after swap(i1, j1), S2 after swap(i2, j2). Only S0 and S2
 * ever exist in the register bank; every S1 value is selected out of S0 by
 * three index comparators:
 *
 *     c1 = (i2 == j1),  c2 = (j2 == i1),  c3 = (j2 == j1)
 *
 * The (c1, c2, c3) assignment is the swap case (1..8). Case 8 needs
 * i1 == i2, which the counter never produces.
 */

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "rc4sim/rc4_ref.hpp"

namespace rc4sim::unroll {

struct UnrolledIndices {
    Octet i1 = 0;
    Octet i2 = 1;
    Octet j1 = 0;
    Octet j2 = 0;

    /// Builds indices with i2 = i1 + 1 (mod 256).
    static constexpr UnrolledIndices from(Octet i1, Octet j1, Octet j2) noexcept {
        return {i1, static_cast<Octet>(i1 + 1), j1, j2};
    }

    constexpr bool valid() const noexcept { return i2 == static_cast<Octet>(i1 + 1); }

    friend constexpr bool operator==(const UnrolledIndices&, const UnrolledIndices&) = default;
};

/// Row number of the double-swap table.
enum class SwapCase : std::uint8_t {
    AllDistinct = 1,       // i2!=j1, j2!=i1, j2!=j1
    J2EqJ1 = 2,            // i2!=j1, j2!=i1, j2==j1
    J2EqI1 = 3,            // i2!=j1, j2==i1, j2!=j1
    J2EqI1EqJ1 = 4,        // i2!=j1, j2==i1, j2==j1
    I2EqJ1 = 5,            // i2==j1, j2!=i1, j2!=j1
    I2EqJ1EqJ2 = 6,        // i2==j1, j2!=i1, j2==j1
    Crossed = 7,           // i2==j1, j2==i1, j2!=j1 (no data movement)
    Impossible = 8,        // i2==j1, j2==i1, j2==j1
};

constexpr int case_number(SwapCase c) noexcept { return static_cast<int>(c); }

std::string_view describe(SwapCase c) noexcept;

/// Case selected from the raw comparator outputs; may return Impossible.
constexpr SwapCase case_from_predicates(bool i2_eq_j1, bool j2_eq_i1, bool j2_eq_j1) noexcept {
    return static_cast<SwapCase>(1 + (i2_eq_j1 ? 4 : 0) + (j2_eq_i1 ? 2 : 0) + (j2_eq_j1 ? 1 : 0));
}

/// Throws InvariantViolation for the case-8 pattern or for i2 != i1 + 1.
SwapCase classify_swap(const UnrolledIndices& idx);

/// One register-bank write issued by the swap controller.
struct RegisterWrite {
    Octet address;
    Octet value;
};

/// Up to four writes; case 7 issues none.
struct SwapMoves {
    std::array<RegisterWrite, 4> writes{};
    std::uint8_t count = 0;
};

/// The four S0 operands read out of the register bank for one unrolled step.
struct SwapOperands {
    Octet s_i1;
    Octet s_i2;
    Octet s_j1;
    Octet s_j2;
};

/**
 * Data movement of the classified case, expressed purely in terms of the
 * latched S0 operands. Applying the writes to S0 yields S2.
 */
SwapMoves double_swap_moves(SwapCase c, const UnrolledIndices& idx, const SwapOperands& s0);

/// Equivalent to swap(S[i1], S[j1]) followed by swap(S[i2], S[j2]).
SBox apply_double_swap(SBox sbox, const UnrolledIndices& idx);

/// j2 for the key schedule; i2_eq_j1 selects S0[i1] in place of S0[i2].
constexpr Octet compute_j2_ksa(Octet j0, Octet s0_i1, Octet s0_i2, Octet k_i1, Octet k_i2, bool i2_eq_j1) noexcept {
    const Octet second = i2_eq_j1 ? s0_i1 : s0_i2;
    return static_cast<Octet>(j0 + s0_i1 + second + k_i1 + k_i2);
}

constexpr Octet compute_j2_prga(Octet j0, Octet s0_i1, Octet s0_i2, bool i2_eq_j1) noexcept {
    return compute_j2_ksa(j0, s0_i1, s0_i2, 0, 0, i2_eq_j1);
}

/// S1[t] read through S0: the first swap only moved positions i1 and j1.
inline Octet s1_through_s0(const SBox& s0, const UnrolledIndices& idx, Octet t) noexcept {
    if (t == idx.i1) return s0[idx.j1];
    if (t == idx.j1) return s0[idx.i1];
    return s0[t];
}

/// Z1 = S1[S0[i1] + S0[j1]].
Octet compute_z1(const SBox& s0, const UnrolledIndices& idx);

/// S1[i2] and S1[j2] picked from S0 by the seven-way selector.
struct Z2Operands {
    Octet s1_i2;
    Octet s1_j2;
};

Z2Operands select_z2_operands(SwapCase c, const SwapOperands& s0);

/// Address S1[i2] + S1[j2] that Z2 is read from once S2 is committed.
Octet z2_address(const SBox& s0, const UnrolledIndices& idx);

/// Z2 = S2[S1[i2] + S1[j2]].
Octet compute_z2(const SBox& s0, const SBox& s2, const UnrolledIndices& idx);

}  // namespace rc4sim::unroll
