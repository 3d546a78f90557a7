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

#include "rc4sim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rc4sim/keystream.hpp"
#include "rc4sim/netlink.hpp"
#include "rc4sim/parallel.hpp"
#include "rc4sim/unroll.hpp"

namespace rc4sim::cli {

namespace {

constexpr std::array<Design, 6> kAllDesigns = {Design::D1, Design::D2, Design::D3,
                                               Design::D4, Design::D5, Design::D6};

// Clock counts do not depend on the key; 16 octets splits evenly over any lane count.
constexpr std::string_view kReportKey = "rc4sim/report/k!";

/// Opens "-" as the standard stream, anything else as a binary file.
class InputFile {
  public:
    explicit InputFile(const std::string& path) {
        if (path == "-") {
            is_ = &std::cin;
        } else {
            file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot open input '" + path + "'");
            is_ = file_.get();
        }
    }
    std::istream& stream() { return *is_; }

  private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* is_ = nullptr;
};

class OutputFile {
  public:
    explicit OutputFile(const std::string& path) : path_(path) {
        if (path == "-") {
            os_ = &std::cout;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file_) throw std::runtime_error("cannot open output '" + path + "'");
            os_ = file_.get();
        }
    }
    void write(std::span<const Octet> data) {
        os_->write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!*os_) throw std::runtime_error("write to '" + path_ + "' failed");
    }
    void finish() {
        os_->flush();
        if (!*os_) throw std::runtime_error("write to '" + path_ + "' failed");
    }

  private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

const SecretKey& require_key(const RunConfig& cfg) {
    if (!cfg.key) throw InvalidInput("a key is required (--key or --key-hex)");
    return *cfg.key;
}

std::string per_byte_text(const CycleReport& r) {
    const auto pb = r.per_byte();
    if (!pb) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << pb->value();
    return os.str();
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
    if (name == "human") return ReportFormat::Human;
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    throw InvalidInput("unknown report format '" + name + "' (human, json, csv)");
}

int cmd_keystream(const RunConfig& cfg, std::ostream& diag) {
    try {
        auto ks = make_keystream(cfg.design, require_key(cfg));
        OutputFile out(cfg.out_path);
        Bytes chunk(kChunkSize);
        for (std::uint64_t left = cfg.n; left > 0;) {
            const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left, chunk.size()));
            const auto part = std::span<Octet>(chunk).first(n);
            ks->generate(part);
            out.write(part);
            left -= n;
        }
        out.finish();
    } catch (const std::exception& e) {
        diag << "rc4sim keystream: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_crypt(const RunConfig& cfg, Direction direction, std::ostream& diag) {
    const char* verb = direction == Direction::Encrypt ? "encrypt" : "decrypt";
    try {
        auto ks = make_keystream(cfg.design, require_key(cfg));
        InputFile in(cfg.in_path);
        OutputFile out(cfg.out_path);
        Bytes chunk(kChunkSize);
        auto& is = in.stream();
        while (is) {
            is.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
            const auto got = static_cast<std::size_t>(is.gcount());
            if (got == 0) break;
            const auto part = std::span<Octet>(chunk).first(got);
            ks->apply(part);
            out.write(part);
        }
        if (is.bad()) throw std::runtime_error("read from '" + cfg.in_path + "' failed");
        out.finish();
    } catch (const std::exception& e) {
        diag << "rc4sim " << verb << ": " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

std::vector<ReportRow> build_report(std::span<const std::uint64_t> n_values, std::span<const Design> designs,
                                    const SecretKey& key) {
    std::vector<ReportRow> rows;
    for (Design d : designs) {
        for (std::uint64_t n : n_values) {
            const auto sim = is_parallel(d) ? parallel::simulate_parallel(d, key, n)
                                            : hwsim::simulate(d, key, n);
            rows.push_back({d, n, sim.report, cycles_formula(d, n)});
        }
    }
    return rows;
}

nlohmann::json report_json(std::span<const ReportRow> rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        const auto f = r.formula.per_byte();
        const auto m = r.measured.per_byte();
        arr.push_back({
            {"design", design_number(r.design)},
            {"n", r.n},
            {"ksa_clocks", r.measured.ksa_clocks},
            {"prga_clocks", r.measured.prga_clocks},
            {"total_clocks", r.measured.total_clocks()},
            {"per_byte_formula", f ? nlohmann::json(f->value()) : nlohmann::json()},
            {"per_byte_measured", m ? nlohmann::json(m->value()) : nlohmann::json()},
            {"formula", std::string(cycles_formula_text(r.design))},
            {"total_clocks_formula", r.formula.total_clocks()},
            {"match", r.matches()},
        });
    }
    return arr;
}

void write_report(std::span<const ReportRow> rows, ReportFormat format, std::ostream& os) {
    switch (format) {
        case ReportFormat::Json:
            os << report_json(rows).dump(2) << '\n';
            return;
        case ReportFormat::Csv:
            os << "design,n,ksa_clocks,prga_clocks,total_clocks,per_byte_formula,per_byte_measured,formula,match\n";
            for (const auto& r : rows) {
                os << design_number(r.design) << ',' << r.n << ',' << r.measured.ksa_clocks << ','
                   << r.measured.prga_clocks << ',' << r.measured.total_clocks() << ',' << per_byte_text(r.formula)
                   << ',' << per_byte_text(r.measured) << ',' << cycles_formula_text(r.design) << ','
                   << (r.matches() ? "true" : "false") << '\n';
            }
            return;
        case ReportFormat::Human:
            break;
    }
    os << std::left << std::setw(8) << "design" << std::setw(10) << "n" << std::setw(8) << "KSA" << std::setw(10)
       << "PRGA" << std::setw(10) << "total" << std::setw(14) << "formula" << std::setw(12) << "per-byte"
       << "status\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(8) << design_number(r.design) << std::setw(10) << r.n << std::setw(8)
           << r.measured.ksa_clocks << std::setw(10) << r.measured.prga_clocks << std::setw(10)
           << r.measured.total_clocks() << std::setw(14) << cycles_formula_text(r.design) << std::setw(12)
           << per_byte_text(r.measured);
        if (r.matches()) {
            os << "ok\n";
        } else {
            os << "MISMATCH (closed form total " << r.formula.total_clocks() << ")\n";
        }
    }
}

int cmd_report(std::span<const std::uint64_t> n_values, ReportFormat format, std::ostream& out,
               std::ostream& diag) {
    if (n_values.empty() || std::find(n_values.begin(), n_values.end(), 0u) != n_values.end()) {
        diag << "rc4sim report: every --n value must be at least 1\n";
        return kExitUsage;
    }
    const auto rows = build_report(n_values, kAllDesigns, SecretKey::from_ascii(kReportKey));
    write_report(rows, format, out);
    const bool all_match = std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.matches(); });
    if (!all_match) diag << "rc4sim report: measured clocks differ from the closed form\n";
    return all_match ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------

namespace {

std::string counterexample(const char* what, const unroll::UnrolledIndices& idx) {
    std::ostringstream os;
    os << what << " at i1=" << unsigned(idx.i1) << " i2=" << unsigned(idx.i2) << " j1=" << unsigned(idx.j1)
       << " j2=" << unsigned(idx.j2);
    return os.str();
}

void verify_i1(unsigned i1, std::uint64_t seed, TableVerification& acc) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + i1);
    SBox s0;
    auto note = [&acc](std::string text) {
        if (!acc.first_counterexample) acc.first_counterexample = std::move(text);
    };
    for (unsigned j1 = 0; j1 < 256; ++j1) {
        auto entries = s0.entries();
        std::shuffle(entries.begin(), entries.end(), rng);
        for (unsigned k = 0; k < 256; ++k) s0[k] = entries[k];

        for (unsigned j2 = 0; j2 < 256; ++j2) {
            const auto idx = unroll::UnrolledIndices::from(static_cast<Octet>(i1), static_cast<Octet>(j1),
                                                           static_cast<Octet>(j2));
            ++acc.total;
            const auto c = unroll::case_from_predicates(idx.i2 == idx.j1, idx.j2 == idx.i1, idx.j2 == idx.j1);
            ++acc.case_counts[unroll::case_number(c)];
            if (c == unroll::SwapCase::Impossible) {
                note(counterexample("case 8 reached", idx));
                continue;
            }

            // Two swaps, one after the other, exactly as the rolled loop does them.
            SBox seq = s0;
            seq.swap(idx.i1, idx.j1);
            const Octet z1_ref = seq[static_cast<Octet>(seq[idx.i1] + seq[idx.j1])];
            seq.swap(idx.i2, idx.j2);
            const Octet z2_ref = seq[static_cast<Octet>(seq[idx.i2] + seq[idx.j2])];

            const SBox fused = unroll::apply_double_swap(s0, idx);
            if (fused != seq) {
                ++acc.swap_mismatches;
                note(counterexample("double swap differs", idx));
            }
            if (unroll::compute_z1(s0, idx) != z1_ref) {
                ++acc.z1_mismatches;
                note(counterexample("Z1 differs", idx));
            }
            if (unroll::compute_z2(s0, fused, idx) != z2_ref) {
                ++acc.z2_mismatches;
                note(counterexample("Z2 differs", idx));
            }
            if (c == unroll::SwapCase::Crossed && fused != s0) {
                ++acc.case7_moved;
                note(counterexample("case 7 moved data", idx));
            }
        }
    }
}

}  // namespace

TableVerification verify_tables(std::uint64_t seed, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, 256u);

    std::atomic<unsigned> next_i1{0};
    std::mutex mu;
    TableVerification result;
    auto worker = [&] {
        TableVerification local;
        for (unsigned i1; (i1 = next_i1++) < 256;) verify_i1(i1, seed, local);
        std::lock_guard lock(mu);
        result.total += local.total;
        for (std::size_t k = 0; k < local.case_counts.size(); ++k) result.case_counts[k] += local.case_counts[k];
        result.swap_mismatches += local.swap_mismatches;
        result.z1_mismatches += local.z1_mismatches;
        result.z2_mismatches += local.z2_mismatches;
        result.case7_moved += local.case7_moved;
        if (!result.first_counterexample && local.first_counterexample) {
            result.first_counterexample = local.first_counterexample;
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return result;
}

int cmd_verify_tables(std::uint64_t seed, unsigned threads, std::ostream& out) {
    const auto v = verify_tables(seed, threads);
    out << "enumerated " << v.total << " (i1, j1, j2) combinations\n";
    for (int c = 1; c <= 8; ++c) {
        out << "  case " << c << "  " << std::left << std::setw(26)
            << unroll::describe(static_cast<unroll::SwapCase>(c)) << std::right << std::setw(10)
            << v.case_counts[c] << '\n';
    }
    out << "double-swap mismatches: " << v.swap_mismatches << '\n'
        << "Z1 mismatches:          " << v.z1_mismatches << '\n'
        << "Z2 mismatches:          " << v.z2_mismatches << '\n'
        << "case 7 with movement:   " << v.case7_moved << '\n';
    if (v.first_counterexample) out << "first counterexample: " << *v.first_counterexample << '\n';
    out << (v.ok() ? "PASS" : "FAIL") << '\n';
    return v.ok() ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------

namespace {

struct KeyFlags {
    std::string ascii;
    std::string hex;

    std::optional<SecretKey> resolve() const {
        if (!hex.empty()) return SecretKey::from_hex(hex);
        if (!ascii.empty()) return SecretKey::from_ascii(ascii);
        return std::nullopt;
    }
};

void add_key_flags(CLI::App* sub, KeyFlags& flags) {
    auto* k = sub->add_option("--key", flags.ascii, "Key as raw ASCII text");
    auto* h = sub->add_option("--key-hex", flags.hex, "Key as hex digits");
    k->excludes(h);
    h->excludes(k);
}

void add_design_flag(CLI::App* sub, int& design) {
    sub->add_option("--design", design, "Hardware design 1..6")->check(CLI::Range(1, 6))->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"rc4sim: cycle-accurate RC4 hardware designs and cipher tools"};
    app.require_subcommand(1);

    int design = 1;
    KeyFlags key_flags;
    std::string in_path = "-";
    std::string out_path = "-";
    std::uint64_t n = 0;
    std::vector<std::uint64_t> n_values;
    std::string format = "human";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::uint16_t port = 0;
    std::string host = "127.0.0.1";
    std::string bind = "0.0.0.0";
    std::size_t frame_size = netlink::kDefaultFrameSize;
    bool verbose = false;

    auto* keystream = app.add_subcommand("keystream", "Write n keystream octets");
    add_design_flag(keystream, design);
    add_key_flags(keystream, key_flags);
    keystream->add_option("--n", n, "Number of octets")->required();
    keystream->add_option("--out", out_path, "Output path ('-' for stdout)");

    CLI::App* crypt[2];
    crypt[0] = app.add_subcommand("encrypt", "XOR a file with the keystream");
    crypt[1] = app.add_subcommand("decrypt", "XOR a file with the keystream");
    for (auto* sub : crypt) {
        add_design_flag(sub, design);
        add_key_flags(sub, key_flags);
        sub->add_option("--in", in_path, "Input path ('-' for stdin)");
        sub->add_option("--out", out_path, "Output path ('-' for stdout)");
    }

    auto* report = app.add_subcommand("report", "Measured and closed-form clock counts for every design");
    report->add_option("--n", n_values, "Byte counts (repeatable)")->required();
    report->add_option("--format", format, "human, json or csv")->capture_default_str();

    auto* verify = app.add_subcommand("verify-tables", "Exhaustive check of the double-swap and Z2 tables");
    verify->add_option("--seed", seed, "Seed for the random S-boxes")->capture_default_str();
    verify->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* serve = app.add_subcommand("serve", "Decrypting endpoint of the framed TCP link");
    add_design_flag(serve, design);
    add_key_flags(serve, key_flags);
    serve->add_option("--port", port, "TCP port")->required();
    serve->add_option("--bind", bind, "IPv4 address to bind")->capture_default_str();
    serve->add_option("--out", out_path, "Append recovered plaintext here");
    serve->add_flag("--verbose", verbose, "Log frames and resets to stderr");

    auto* send = app.add_subcommand("send", "Encrypting endpoint of the framed TCP link");
    add_design_flag(send, design);
    add_key_flags(send, key_flags);
    send->add_option("--host", host, "Peer host")->capture_default_str();
    send->add_option("--port", port, "Peer TCP port")->required();
    send->add_option("--in", in_path, "Input path ('-' for stdin)");
    send->add_option("--frame-size", frame_size, "Payload octets per frame")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "rc4sim: " << e.what() << '\n';
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg.design = design_from_number(design);
        cfg.key = key_flags.resolve();
        cfg.format = parse_format(format);
    } catch (const InvalidInput& e) {
        std::cerr << "rc4sim: " << e.what() << '\n';
        return kExitUsage;
    }
    cfg.in_path = in_path;
    cfg.out_path = out_path;
    cfg.n = n;

    if (keystream->parsed()) return cmd_keystream(cfg, std::cerr);
    if (crypt[0]->parsed()) return cmd_crypt(cfg, Direction::Encrypt, std::cerr);
    if (crypt[1]->parsed()) return cmd_crypt(cfg, Direction::Decrypt, std::cerr);
    if (report->parsed()) return cmd_report(n_values, cfg.format, std::cout, std::cerr);
    if (verify->parsed()) return cmd_verify_tables(seed, threads, std::cout);

    if (!cfg.key) {
        std::cerr << "rc4sim: a key is required (--key or --key-hex)\n";
        return kExitUsage;
    }

    if (serve->parsed()) {
        try {
            netlink::Server server(*cfg.key, cfg.design, port, bind);
            std::unique_ptr<std::ofstream> sink;
            std::mutex sink_mu;
            if (out_path != "-") {
                sink = std::make_unique<std::ofstream>(out_path, std::ios::binary | std::ios::app);
                if (!*sink) throw std::runtime_error("cannot open output '" + out_path + "'");
                server.set_plaintext_sink([&](std::uint64_t, std::span<const Octet> data) {
                    std::lock_guard lock(sink_mu);
                    sink->write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
                    sink->flush();
                });
            }
            if (verbose) server.set_logger([](const std::string& line) { std::cerr << line << '\n'; });
            server.start();
            std::cerr << "rc4sim serve: listening on " << bind << ':' << server.port() << " design "
                      << design_number(cfg.design) << '\n';
            server.serve_forever();
        } catch (const std::exception& e) {
            std::cerr << "rc4sim serve: " << e.what() << '\n';
            return kExitUsage;
        }
        return kExitOk;
    }

    if (send->parsed()) {
        try {
            InputFile in(in_path);
            const auto summary = netlink::send(host, port, *cfg.key, cfg.design, in.stream(), frame_size);
            std::cout << "frames " << summary.frames << " bytes " << summary.bytes << " acks_matched "
                      << summary.acks_matched << " acks_mismatched " << summary.acks_mismatched << '\n';
            return summary.all_acked() ? kExitOk : kExitVerifyFailed;
        } catch (const netlink::TransferError& e) {
            std::cerr << "rc4sim send: " << e.what() << " after " << e.partial().frames << " frames ("
                      << e.partial().bytes << " bytes)\n";
            return kExitUsage;
        } catch (const std::exception& e) {
            std::cerr << "rc4sim send: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    return kExitUsage;
}

}  // namespace rc4sim::cli
