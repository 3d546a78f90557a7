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
 * @file cli.hpp
 * @brief Subcommands of the rc4sim tool, callable in-process.
 *
 * Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.
 */

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rc4sim/hwsim.hpp"
#include "rc4sim/rc4_ref.hpp"

namespace rc4sim::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitVerifyFailed = 2 };

enum class ReportFormat { Human, Json, Csv };
enum class Direction { Encrypt, Decrypt };

ReportFormat parse_format(const std::string& name);

struct RunConfig {
    Design design = Design::D1;
    std::optional<SecretKey> key;
    /// "-" means stdin / stdout.
    std::string in_path = "-";
    std::string out_path = "-";
    std::uint64_t n = 0;
    ReportFormat format = ReportFormat::Human;
};

/// Streaming chunk size for file I/O; never visible in the output.
inline constexpr std::size_t kChunkSize = 64 * 1024;

int cmd_keystream(const RunConfig& cfg, std::ostream& diag);
/// Encrypt and decrypt are the same XOR; the direction only labels messages.
int cmd_crypt(const RunConfig& cfg, Direction direction, std::ostream& diag);

struct ReportRow {
    Design design;
    std::uint64_t n;
    CycleReport measured;
    CycleReport formula;

    bool matches() const noexcept { return measured == formula; }
};

std::vector<ReportRow> build_report(std::span<const std::uint64_t> n_values,
                                    std::span<const Design> designs, const SecretKey& key);
nlohmann::json report_json(std::span<const ReportRow> rows);
void write_report(std::span<const ReportRow> rows, ReportFormat format, std::ostream& os);
int cmd_report(std::span<const std::uint64_t> n_values, ReportFormat format, std::ostream& out,
               std::ostream& diag);

/// Outcome of the exhaustive double-swap and Z2-selector enumeration.
struct TableVerification {
    /// Index 1..8 by swap case; index 0 unused.
    std::array<std::uint64_t, 9> case_counts{};
    std::uint64_t total = 0;
    std::uint64_t swap_mismatches = 0;
    std::uint64_t z1_mismatches = 0;
    std::uint64_t z2_mismatches = 0;
    /// Case-7 combinations whose S-box changed.
    std::uint64_t case7_moved = 0;
    std::optional<std::string> first_counterexample;

    bool ok() const noexcept {
        return total == (1ull << 24) && case_counts[8] == 0 && swap_mismatches == 0 && z1_mismatches == 0 &&
               z2_mismatches == 0 && case7_moved == 0;
    }
};

/**
 * Enumerates all (i1, j1, j2) in 0..255^3 with a fresh random S-box per
 * (i1, j1) and compares the case-resolved datapath against two sequential
 * swaps.
 */
TableVerification verify_tables(std::uint64_t seed = 1, unsigned threads = 0);
int cmd_verify_tables(std::uint64_t seed, unsigned threads, std::ostream& out);

/// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace rc4sim::cli
