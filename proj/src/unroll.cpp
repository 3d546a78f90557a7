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

#include "rc4sim/unroll.hpp"

#include <string>

namespace rc4sim::unroll {

std::string_view describe(SwapCase c) noexcept {
    switch (c) {
        case SwapCase::AllDistinct: return "i2!=j1 & j2!=i1 & j2!=j1";
        case SwapCase::J2EqJ1: return "i2!=j1 & j2!=i1 & j2==j1";
        case SwapCase::J2EqI1: return "i2!=j1 & j2==i1 & j2!=j1";
        case SwapCase::J2EqI1EqJ1: return "i2!=j1 & j2==i1 & j2==j1";
        case SwapCase::I2EqJ1: return "i2==j1 & j2!=i1 & j2!=j1";
        case SwapCase::I2EqJ1EqJ2: return "i2==j1 & j2!=i1 & j2==j1";
        case SwapCase::Crossed: return "i2==j1 & j2==i1 & j2!=j1";
        case SwapCase::Impossible: return "i2==j1 & j2==i1 & j2==j1";
    }
    return "?";
}

SwapCase classify_swap(const UnrolledIndices& idx) {
    if (!idx.valid()) {
        throw InvariantViolation("unrolled indices require i2 == i1 + 1, got i1=" + std::to_string(idx.i1) +
                                 " i2=" + std::to_string(idx.i2));
    }
    const auto c = case_from_predicates(idx.i2 == idx.j1, idx.j2 == idx.i1, idx.j2 == idx.j1);
    if (c == SwapCase::Impossible) {
        // Reaching this means i1 == i2, which contradicts the check above.
        throw InvariantViolation("swap case 8 reached at i1=" + std::to_string(idx.i1) +
                                 " j1=" + std::to_string(idx.j1) + " j2=" + std::to_string(idx.j2));
    }
    return c;
}

SwapMoves double_swap_moves(SwapCase c, const UnrolledIndices& idx, const SwapOperands& s0) {
    SwapMoves m;
    auto put = [&m](Octet addr, Octet value) { m.writes[m.count++] = {addr, value}; };

    switch (c) {
        case SwapCase::AllDistinct:
            put(idx.j1, s0.s_i1);
            put(idx.i1, s0.s_j1);
            put(idx.j2, s0.s_i2);
            put(idx.i2, s0.s_j2);
            break;
        case SwapCase::J2EqJ1:
            put(idx.i2, s0.s_i1);
            put(idx.j1, s0.s_i2);
            put(idx.i1, s0.s_j1);
            break;
        case SwapCase::J2EqI1:
            put(idx.j1, s0.s_i1);
            put(idx.i1, s0.s_i2);
            put(idx.i2, s0.s_j1);
            break;
        case SwapCase::J2EqI1EqJ1:
            put(idx.i2, s0.s_i1);
            put(idx.i1, s0.s_i2);
            break;
        case SwapCase::I2EqJ1:
            put(idx.j2, s0.s_i1);
            put(idx.j1, s0.s_j2);
            put(idx.i1, s0.s_j1);
            break;
        case SwapCase::I2EqJ1EqJ2:
            put(idx.j1, s0.s_i1);
            put(idx.i1, s0.s_j1);
            break;
        case SwapCase::Crossed:
            break;
        case SwapCase::Impossible:
            throw InvariantViolation("no data movement is defined for swap case 8");
    }
    return m;
}

SBox apply_double_swap(SBox sbox, const UnrolledIndices& idx) {
    const auto c = classify_swap(idx);
    const SwapOperands s0{sbox[idx.i1], sbox[idx.i2], sbox[idx.j1], sbox[idx.j2]};
    const auto moves = double_swap_moves(c, idx, s0);
    for (std::uint8_t k = 0; k < moves.count; ++k) sbox[moves.writes[k].address] = moves.writes[k].value;
    return sbox;
}

Octet compute_z1(const SBox& s0, const UnrolledIndices& idx) {
    const auto t = static_cast<Octet>(s0[idx.i1] + s0[idx.j1]);
    return s1_through_s0(s0, idx, t);
}

Z2Operands select_z2_operands(SwapCase c, const SwapOperands& s0) {
    switch (c) {
        case SwapCase::AllDistinct: return {s0.s_i2, s0.s_j2};
        case SwapCase::J2EqJ1: return {s0.s_i2, s0.s_i1};
        case SwapCase::J2EqI1: return {s0.s_i2, s0.s_j1};
        case SwapCase::J2EqI1EqJ1: return {s0.s_i2, s0.s_j1};
        case SwapCase::I2EqJ1: return {s0.s_i1, s0.s_j2};
        case SwapCase::I2EqJ1EqJ2: return {s0.s_i1, s0.s_i1};
        case SwapCase::Crossed: return {s0.s_i1, s0.s_j1};
        case SwapCase::Impossible: break;
    }
    throw InvariantViolation("no Z2 operand selection is defined for swap case 8");
}

Octet z2_address(const SBox& s0, const UnrolledIndices& idx) {
    const auto c = classify_swap(idx);
    const auto ops = select_z2_operands(c, {s0[idx.i1], s0[idx.i2], s0[idx.j1], s0[idx.j2]});
    return static_cast<Octet>(ops.s1_i2 + ops.s1_j2);
}

Octet compute_z2(const SBox& s0, const SBox& s2, const UnrolledIndices& idx) {
    return s2[z2_address(s0, idx)];
}

}  // namespace rc4sim::unroll
