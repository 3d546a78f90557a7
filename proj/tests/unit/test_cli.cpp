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

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"
#include "rc4sim/cli.hpp"

using namespace rc4sim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rc4sim_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

Bytes read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& p, const Bytes& data) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

// Runs the real binary; returns its exit status.
int rc4sim_exe(const std::string& args) {
    const std::string cmd = std::string(RC4SIM_CLI_PATH) + " " + args + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("keystream subcommand") {
    TempDir tmp;
    REQUIRE(rc4sim_exe("keystream --design 1 --key-hex 00 --n 0 --out " + tmp / "empty.bin") == 0);
    CHECK(fs::exists(tmp / "empty.bin"));
    CHECK(fs::file_size(tmp / "empty.bin") == 0);

    REQUIRE(rc4sim_exe("keystream --design 1 --key-hex 00 --n 8 --out " + tmp / "z.bin") == 0);
    CHECK(to_hex(read_file(tmp / "z.bin")) == "de188941a3375d3a");

    REQUIRE(rc4sim_exe("keystream --design 1 --key Secret --n 777 --out " + tmp / "d1.bin") == 0);
    REQUIRE(rc4sim_exe("keystream --design 2 --key Secret --n 777 --out " + tmp / "d2.bin") == 0);
    REQUIRE(rc4sim_exe("keystream --design 4 --key Secret --n 777 --out " + tmp / "d4.bin") == 0);
    CHECK(read_file(tmp / "d1.bin") == read_file(tmp / "d2.bin"));
    CHECK(read_file(tmp / "d1.bin") == read_file(tmp / "d4.bin"));
    CHECK(read_file(tmp / "d1.bin") == oracle::rc4_keystream(oracle::from_text("Secret"), 777));
}

TEST_CASE("encrypt and decrypt") {
    TempDir tmp;
    write_file(tmp / "p.txt", oracle::from_text("Plaintext"));
    REQUIRE(rc4sim_exe("encrypt --design 1 --key Key --in " + tmp / "p.txt" + " --out " + tmp / "c.bin") == 0);
    CHECK(to_hex(read_file(tmp / "c.bin")) == "bbf316e8d940af0ad3");

    std::mt19937_64 rng(17);
    const auto plain = oracle::random_bytes(rng, 200003);
    write_file(tmp / "big.bin", plain);
    for (int d = 1; d <= 6; ++d) {
        CAPTURE(d);
        const auto ds = std::to_string(d);
        REQUIRE(rc4sim_exe("encrypt --design " + ds + " --key-hex 00112233445566 --in " + tmp / "big.bin" +
                           " --out " + tmp / "big.enc") == 0);
        REQUIRE(rc4sim_exe("decrypt --design " + ds + " --key-hex 00112233445566 --in " + tmp / "big.enc" +
                           " --out " + tmp / "big.dec") == 0);
        CHECK(read_file(tmp / "big.enc") != plain);
        CHECK(read_file(tmp / "big.dec") == plain);
    }

    // Empty input gives empty output.
    write_file(tmp / "nothing", {});
    REQUIRE(rc4sim_exe("encrypt --design 3 --key k --in " + tmp / "nothing" + " --out " + tmp / "nothing.enc") == 0);
    CHECK(fs::file_size(tmp / "nothing.enc") == 0);
}

TEST_CASE("usage errors exit with status 1") {
    TempDir tmp;
    CHECK(rc4sim_exe("keystream --design 5 --key abc --n 16 --out " + tmp / "x") == 1);
    CHECK(rc4sim_exe("keystream --design 6 --key a --n 16 --out " + tmp / "x") == 1);
    CHECK(rc4sim_exe("keystream --design 5 --key abcd --n 16 --out " + tmp / "x") == 0);
    CHECK(rc4sim_exe("keystream --design 7 --key abc --n 1") == 1);
    CHECK(rc4sim_exe("keystream --design 1 --key-hex 0g --n 1") == 1);
    CHECK(rc4sim_exe("keystream --design 1 --key a --key-hex 00 --n 1") == 1);
    CHECK(rc4sim_exe("keystream --design 1 --n 1") == 1);
    CHECK(rc4sim_exe("encrypt --design 1 --key a --in " + tmp / "missing" + " --out " + tmp / "y") == 1);
    CHECK(rc4sim_exe("keystream --design 1 --key a --n 4 --out /nonexistent-dir/x") == 1);
    CHECK(rc4sim_exe("frobnicate") == 1);
    CHECK(rc4sim_exe("--help >/dev/null") == 0);
}

TEST_CASE("report rows") {
    const std::uint64_t ns[] = {256};
    const std::vector<Design> all{Design::D1, Design::D2, Design::D3, Design::D4, Design::D5, Design::D6};
    const auto rows = cli::build_report(ns, all, SecretKey::from_ascii("report-key"));
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) CHECK(r.matches());
    CHECK(rows[0].measured.total_clocks() == 515);
    CHECK(rows[2].measured.per_byte() == Rational::reduced(259, 256));
    CHECK(rows[4].measured.total_clocks() == 257 + 2 + 64);

    std::ostringstream js;
    cli::write_report(rows, cli::ReportFormat::Json, js);
    const auto doc = nlohmann::json::parse(js.str());
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 6);
    for (const char* field : {"design", "n", "ksa_clocks", "prga_clocks", "total_clocks", "per_byte_formula",
                              "per_byte_measured", "formula", "match"}) {
        CAPTURE(field);
        CHECK(doc[0].contains(field));
    }
    CHECK(doc[0]["total_clocks"] == 515);
    CHECK(doc[0]["match"] == true);

    std::ostringstream csv;
    cli::write_report(rows, cli::ReportFormat::Csv, csv);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);

    std::ostringstream out, diag;
    const std::uint64_t zero[] = {0};
    CHECK(cli::cmd_report(zero, cli::ReportFormat::Human, out, diag) == cli::kExitUsage);
    CHECK_THROWS(cli::parse_format("xml"));
}

TEST_CASE("report through the binary") {
    TempDir tmp;
    REQUIRE(rc4sim_exe("report --n 16 --n 1024 --format json > " + tmp / "r.json") == 0);
    std::ifstream in(tmp / "r.json");
    const auto doc = nlohmann::json::parse(in);
    CHECK(doc.size() == 12);
}
