#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ftsynth/bench.hpp"
#include "ftsynth/canondb.hpp"
#include "ftsynth/gateset.hpp"
#include "ftsynth/search.hpp"
#include "ftsynth/unitary.hpp"

namespace {

using namespace ftsynth;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitBudget = 4;

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (pos != s.size()) {
        throw std::invalid_argument("trailing characters in number: '" + s + "'");
    }
    return v;
}

long parse_int(const std::string& s) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
    if (pos != s.size()) {
        throw std::invalid_argument("trailing characters in integer: '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        parts.push_back(item);
    }
    if (!s.empty() && s.back() == sep) {
        parts.push_back("");
    }
    return parts;
}

// Target specs:
//   R:d=<int>          diag(1, e^{i pi/2^d})
//   R:phi=<float>      diag(1, e^{i phi})
//   euler:<a>,<b>,<t>  Euler-angle unitary
//   mat:<8 floats>     row-major re/im entries, checked unitary to 1e-9
Unitary2 parse_target(const std::string& spec) {
    if (spec.rfind("R:d=", 0) == 0) {
        return phase_gate_pow2(static_cast<int>(parse_int(spec.substr(4))));
    }
    if (spec.rfind("R:phi=", 0) == 0) {
        return phase_gate(parse_double(spec.substr(6)));
    }
    if (spec.rfind("euler:", 0) == 0) {
        const auto parts = split(spec.substr(6), ',');
        if (parts.size() != 3) {
            throw std::invalid_argument("euler: target needs 3 comma-separated angles");
        }
        return from_euler(parse_double(parts[0]), parse_double(parts[1]),
                          parse_double(parts[2]));
    }
    if (spec.rfind("mat:", 0) == 0) {
        const auto parts = split(spec.substr(4), ',');
        if (parts.size() != 8) {
            throw std::invalid_argument("mat: target needs 8 comma-separated floats");
        }
        double v[8];
        for (int i = 0; i < 8; ++i) {
            v[i] = parse_double(parts[static_cast<std::size_t>(i)]);
        }
        return Unitary2::from_entries({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]},
                                      {v[6], v[7]}, 1e-9);
    }
    throw std::invalid_argument(
        "unrecognized target spec '" + spec +
        "' (expected R:d=<int>, R:phi=<float>, euler:<a>,<b>,<t>, or mat:<8 floats>)");
}

CanonDb open_db(const std::string& path, int lprime) {
    if (std::filesystem::exists(path)) {
        return load_db(path);
    }
    std::cerr << "warning: database '" << path << "' not found; building lprime="
              << lprime << " now (one-time cost)\n";
    CanonDb db = build_canon_db(lprime);
    try {
        save_db(db, path);
    } catch (const std::exception& e) {
        std::cerr << "warning: could not save database: " << e.what() << "\n";
    }
    return db;
}

void warn_lmax(int lmax) {
    if (lmax > 21) {
        std::cerr << "warning: lmax=" << lmax
                  << " enumerates a very large space; expect long runtimes\n";
    }
}

// Labels land in a CSV column; commas inside them would shift columns.
std::string csv_label(std::string s) {
    for (char& c : s) {
        if (c == ',') {
            c = ';';
        }
    }
    return s;
}

void write_csv_to(const std::string& out_path, const std::string& config_echo,
                  std::span<const std::string> labels,
                  std::span<const std::vector<SearchResult>> profiles,
                  const ScalingFit* fit) {
    if (out_path.empty() || out_path == "-") {
        write_profile_csv(std::cout, config_echo, labels, profiles, fit);
        return;
    }
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open output file " + out_path);
    }
    write_profile_csv(f, config_echo, labels, profiles, fit);
    if (!f.good()) {
        throw std::runtime_error("failed writing output file " + out_path);
    }
}

void print_summary(const SearchResult& r) {
    std::cout << "dist=" << fmt_g17(r.best_dist) << " len=" << r.best_seq.size()
              << " t_count=" << r.t_count << " optima=" << r.optima_count
              << " visited=" << r.sequences_visited
              << " skipped=" << fmt_g17(r.sequences_skipped)
              << " seq=" << format_seq(r.best_seq) << "\n";
    std::cerr << "wall_seconds=" << r.wall_seconds << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal fault-tolerant single-qubit gate sequences"};
    app.require_subcommand(1);

    // build-db
    auto* cmd_build = app.add_subcommand("build-db", "Build and save a canonical sequence database");
    int bd_lprime = 10;
    std::string bd_out = "canon.gfdb";
    long bd_max_mb = 2048;
    cmd_build->add_option("--lprime", bd_lprime, "Database sequence length")
        ->capture_default_str()
        ->check(CLI::Range(1, 16));
    cmd_build->add_option("--out", bd_out, "Output file")->capture_default_str();
    cmd_build->add_option("--max-mem-mb", bd_max_mb, "Memory budget in MiB")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // approx
    auto* cmd_approx = app.add_subcommand("approx", "Find the optimal approximation of a target");
    std::string ap_target;
    int ap_lmax = 21;
    int ap_lprime = 10;
    int ap_shards = 0;
    std::uint64_t ap_budget = 0;
    std::string ap_db = "canon.gfdb";
    std::string ap_csv;
    cmd_approx->add_option("--target", ap_target, "Target spec (R:d=, R:phi=, euler:, mat:)")
        ->required();
    cmd_approx->add_option("--lmax", ap_lmax, "Longest sequence length to search")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_approx->add_option("--db", ap_db, "Database file (built on demand if missing)")
        ->capture_default_str();
    cmd_approx->add_option("--lprime", ap_lprime, "Database length when auto-building")
        ->capture_default_str()
        ->check(CLI::Range(1, 16));
    cmd_approx->add_option("--shards", ap_shards, "Worker threads (0 = all cores)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_approx->add_option("--budget", ap_budget, "Abort after this many visited sequences (0 = unlimited)")
        ->capture_default_str();
    cmd_approx->add_option("--csv", ap_csv, "Also write per-length results to this CSV file");

    // verify-fixtures
    auto* cmd_verify = app.add_subcommand("verify-fixtures", "Check the published 31- and 46-gate sequences");

    // bench-phase
    auto* cmd_phase = app.add_subcommand("bench-phase", "Search the phase-gate family R:d over a range of d");
    int ph_dlo = 1, ph_dhi = 10, ph_lmax = 15, ph_lprime = 10, ph_shards = 0;
    std::string ph_db = "canon.gfdb";
    std::string ph_out;
    cmd_phase->add_option("--dlo", ph_dlo, "Smallest d")->capture_default_str()->check(CLI::Range(0, 60));
    cmd_phase->add_option("--dhi", ph_dhi, "Largest d")->capture_default_str()->check(CLI::Range(0, 60));
    cmd_phase->add_option("--lmax", ph_lmax, "Longest sequence length to search")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_phase->add_option("--db", ph_db, "Database file")->capture_default_str();
    cmd_phase->add_option("--lprime", ph_lprime, "Database length when auto-building")
        ->capture_default_str()
        ->check(CLI::Range(1, 16));
    cmd_phase->add_option("--shards", ph_shards, "Worker threads (0 = all cores)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_phase->add_option("--out", ph_out, "CSV output file (default stdout)");

    // bench-random
    auto* cmd_rand = app.add_subcommand("bench-random", "Average convergence over random targets and fit the scaling law");
    std::uint64_t rn_seed = 1;
    int rn_targets = 50, rn_lmax = 15, rn_fit_lo = 4, rn_fit_hi = -1;
    int rn_lprime = 10, rn_shards = 0;
    bool rn_no_fit = false;
    std::string rn_db = "canon.gfdb";
    std::string rn_out;
    cmd_rand->add_option("--seed", rn_seed, "Random seed")->capture_default_str();
    cmd_rand->add_option("--targets", rn_targets, "Number of random targets")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd_rand->add_option("--lmax", rn_lmax, "Longest sequence length to search")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_rand->add_option("--fit-lo", rn_fit_lo, "First length in the fit range")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_rand->add_option("--fit-hi", rn_fit_hi, "Last length in the fit range (-1 = lmax)")
        ->capture_default_str();
    cmd_rand->add_option("--db", rn_db, "Database file")->capture_default_str();
    cmd_rand->add_option("--lprime", rn_lprime, "Database length when auto-building")
        ->capture_default_str()
        ->check(CLI::Range(1, 16));
    cmd_rand->add_option("--shards", rn_shards, "Worker threads (0 = all cores)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd_rand->add_flag("--no-fit", rn_no_fit, "Skip the trailing fit line");
    cmd_rand->add_option("--out", rn_out, "CSV output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (cmd_build->parsed()) {
            const CanonDb db = build_canon_db(
                bd_lprime, static_cast<std::size_t>(bd_max_mb) << 20);
            save_db(db, bd_out);
            for (int l = 0; l <= db.lprime(); ++l) {
                std::cout << "l=" << l << " entries=" << db.entries(l).size() << "\n";
            }
            std::cout << "total=" << db.total_entries() << " lprime=" << db.lprime()
                      << " file=" << bd_out << "\n";
            return 0;
        }

        if (cmd_approx->parsed()) {
            const Unitary2 target = parse_target(ap_target);
            const CanonDb db = open_db(ap_db, ap_lprime);
            warn_lmax(ap_lmax);
            const SearchOptions opts{ap_shards, ap_budget};
            if (!ap_csv.empty()) {
                const auto profile = search_profile(target, ap_lmax, db, opts);
                const std::string label = csv_label(ap_target);
                const std::string echo = "# ftsynth approx\n# target=" + label +
                                         " lmax=" + std::to_string(ap_lmax) +
                                         " db-lprime=" + std::to_string(db.lprime()) +
                                         "\n";
                const std::vector<std::string> labels{label};
                const std::vector<std::vector<SearchResult>> profiles{profile};
                write_csv_to(ap_csv, echo, labels, profiles, nullptr);
                print_summary(profile.back());
            } else {
                print_summary(search_optimal(target, ap_lmax, db, opts));
            }
            return 0;
        }

        if (cmd_verify->parsed()) {
            bool ok = true;
            for (const FixtureCheck& c : verify_fixtures()) {
                const bool pass = c.rel_err <= 0.10;
                ok = ok && pass;
                std::cout << c.name << ": length=" << c.length << " t_count=" << c.t_count
                          << " dist=" << fmt_g17(c.dist)
                          << " published=" << fmt_g17(c.published)
                          << " rel_err=" << fmt_g17(c.rel_err * 100.0) << "% "
                          << (pass ? "PASS" : "FAIL") << "\n";
            }
            return ok ? 0 : 1;
        }

        if (cmd_phase->parsed()) {
            if (ph_dlo > ph_dhi) {
                std::cerr << "error: --dlo must not exceed --dhi\n";
                return kExitUsage;
            }
            const CanonDb db = open_db(ph_db, ph_lprime);
            warn_lmax(ph_lmax);
            const SearchOptions opts{ph_shards, 0};
            std::vector<std::string> labels;
            std::vector<std::vector<SearchResult>> profiles;
            for (int d = ph_dlo; d <= ph_dhi; ++d) {
                labels.push_back("R:d=" + std::to_string(d));
                profiles.push_back(search_profile(phase_gate_pow2(d), ph_lmax, db, opts));
            }
            const std::string echo =
                "# ftsynth bench-phase\n# dlo=" + std::to_string(ph_dlo) +
                " dhi=" + std::to_string(ph_dhi) + " lmax=" + std::to_string(ph_lmax) +
                " db-lprime=" + std::to_string(db.lprime()) + "\n";
            write_csv_to(ph_out, echo, labels, profiles, nullptr);
            return 0;
        }

        if (cmd_rand->parsed()) {
            if (rn_fit_hi < 0) {
                rn_fit_hi = rn_lmax;
            }
            if (rn_fit_lo > rn_fit_hi || rn_fit_hi > rn_lmax) {
                std::cerr << "error: fit range must satisfy 0 <= fit-lo <= fit-hi <= lmax\n";
                return kExitUsage;
            }
            const CanonDb db = open_db(rn_db, rn_lprime);
            warn_lmax(rn_lmax);
            const SearchOptions opts{rn_shards, 0};
            const ScalingResult res = scaling_experiment(rn_seed, rn_targets, rn_lmax,
                                                         db, rn_fit_lo, rn_fit_hi, opts);
            std::vector<std::string> labels;
            for (int i = 0; i < rn_targets; ++i) {
                labels.push_back(std::to_string(i));
            }
            const std::string echo =
                "# ftsynth bench-random\n# seed=" + std::to_string(rn_seed) +
                " targets=" + std::to_string(rn_targets) +
                " lmax=" + std::to_string(rn_lmax) + " fit=" + std::to_string(rn_fit_lo) +
                ".." + std::to_string(rn_fit_hi) +
                " db-lprime=" + std::to_string(db.lprime()) + "\n";
            write_csv_to(rn_out, echo, labels, res.profiles,
                         rn_no_fit ? nullptr : &res.fit);
            if (!rn_no_fit) {
                std::cerr << "fit: a=" << fmt_g17(res.fit.a) << " b=" << fmt_g17(res.fit.b)
                          << " range=[" << res.fit.l_lo << "," << res.fit.l_hi << "]\n";
            }
            return 0;
        }
    } catch (const SearchBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const DbBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const DbFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
