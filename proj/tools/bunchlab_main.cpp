#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bunchlab/conjectures.hpp"
#include "bunchlab/distinguishability.hpp"
#include "bunchlab/errors.hpp"
#include "bunchlab/interferometry.hpp"
#include "bunchlab/io.hpp"
#include "bunchlab/matcore.hpp"
#include "bunchlab/oracle.hpp"
#include "bunchlab/permanent.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitViolation = 10;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitSizeCap = 4;

std::vector<bunchlab::Index> parse_subset(const std::string& text) {
    std::vector<bunchlab::Index> subset;
    std::string item;
    std::istringstream stream(text);
    while (std::getline(stream, item, ',')) {
        std::size_t consumed = 0;
        long long value = 0;
        try {
            value = std::stoll(item, &consumed);
        } catch (const std::exception&) {
            throw bunchlab::ValidationError("--subset: cannot parse '" + item + "'");
        }
        if (consumed != item.size() || value < 1)
            throw bunchlab::ValidationError("--subset: indices are 1-based positive, got '" +
                                            item + "'");
        subset.push_back(static_cast<bunchlab::Index>(value - 1));
    }
    if (subset.empty()) throw bunchlab::ValidationError("--subset: empty list");
    return subset;
}

json subset_json(const std::vector<bunchlab::Index>& subset) {
    json out = json::array();
    for (bunchlab::Index k : subset) out.push_back(k + 1);
    return out;
}

std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 1) throw bunchlab::ValidationError("--steps must be at least 1");
    if (lo > hi) throw bunchlab::ValidationError("--epsilon-min exceeds --epsilon-max");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps));
    if (steps == 1) {
        grid.push_back(lo);
        return grid;
    }
    for (int k = 0; k < steps; ++k)
        grid.push_back(lo + (hi - lo) * static_cast<double>(k) / (steps - 1));
    return grid;
}

bunchlab::CMat haar_unitary(bunchlab::Index m, std::uint64_t seed) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(0x48616172)};
    std::mt19937_64 eng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bunchlab::CMat G(m, m);
    for (bunchlab::Index i = 0; i < m; ++i)
        for (bunchlab::Index j = 0; j < m; ++j)
            G(i, j) = bunchlab::Complex(gauss(eng), gauss(eng));
    Eigen::HouseholderQR<bunchlab::CMat> qr(G);
    bunchlab::CMat Q = qr.householderQ() * bunchlab::CMat::Identity(m, m);
    const bunchlab::CMat R = qr.matrixQR();
    for (bunchlab::Index j = 0; j < m; ++j) {
        const bunchlab::Complex d = R(j, j);
        if (std::abs(d) > 1e-300) Q.col(j) *= d / std::abs(d);
    }
    return Q;
}

json vector_json(const bunchlab::CVec& v) {
    json out = json::array();
    for (bunchlab::Index i = 0; i < v.size(); ++i)
        out.push_back({v(i).real(), v(i).imag()});
    return out;
}

json verdict_json(const bunchlab::ConjectureVerdict& v) {
    json j{{"conjecture", v.conjecture}, {"ratio", v.ratio},       {"margin", v.margin},
           {"tolerance", v.tolerance},   {"violated", v.violated}, {"degenerate", v.degenerate}};
    if (v.trial >= 0) j["trial"] = v.trial;
    if (v.witness_vector.size() > 0) j["witness_vector"] = vector_json(v.witness_vector);
    return j;
}

bunchlab::CVec read_direction(const std::string& path) {
    const bunchlab::CMat M = bunchlab::read_matrix(path);
    if (M.cols() == 1) return M.col(0);
    if (M.rows() == 1) return M.row(0).transpose();
    throw bunchlab::ValidationError(path + ": direction file must be a single row or column");
}

struct DrurySetup {
    bunchlab::BunchingSetup setup;
    double alpha = 0.0;
};

DrurySetup build_drury_setup(std::uint64_t seed) {
    const bunchlab::Rescaled rs = bunchlab::rescale_to_contraction(bunchlab::drury_matrix());
    const bunchlab::Interferometer itf = bunchlab::complete_to_unitary(rs.B, 10, seed);
    DrurySetup out;
    out.setup = bunchlab::h_matrix(itf, {0, 1}, 8);
    out.alpha = rs.alpha;
    return out;
}

struct DruryOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
};

int cmd_drury(const DruryOptions& opt) {
    const bunchlab::CMat M = bunchlab::drury_matrix();
    const bunchlab::CMat A = bunchlab::drury_gram();
    const bunchlab::Rescaled rs = bunchlab::rescale_to_contraction(M);
    const bunchlab::Interferometer itf = bunchlab::complete_to_unitary(rs.B, 10, opt.seed);
    const bunchlab::BunchingSetup setup = bunchlab::h_matrix(itf, {0, 1}, 8);
    const bunchlab::ConjectureVerdict m2 = bunchlab::check_m2(setup.H);
    const bunchlab::OptimalDirections dirs = bunchlab::optimal_directions(setup.H);
    const bunchlab::FMatrix fm = bunchlab::f_matrix(setup.H);
    const double perm_h = fm.source_perm.real();
    const bunchlab::CMat b05 = bunchlab::theorem1_gram(m2.witness_vector, 0.5);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw bunchlab::IoError("cannot create output directory " + opt.out_dir);
    const json meta{{"seed", opt.seed}, {"command", "drury"}};
    const auto at = [&](const char* name) { return (fs::path(opt.out_dir) / name).string(); };
    bunchlab::write_matrix(at("drury_M.json"), M, meta);
    bunchlab::write_matrix(at("drury_A.json"), A, meta);
    bunchlab::write_matrix(at("drury_U.json"), itf.U, meta);
    bunchlab::write_matrix(at("drury_H.json"), setup.H, meta);
    bunchlab::write_matrix(at("drury_F.json"), fm.F, meta);
    bunchlab::write_matrix(at("drury_vmax.json"), bunchlab::CMat(dirs.v_max), meta);
    bunchlab::write_matrix(at("drury_B05.json"), b05, meta);

    json summary{{"ratio", m2.ratio},
                 {"perm_H", perm_h},
                 {"lambda_max", dirs.lambda_max},
                 {"lambda_min", dirs.lambda_min},
                 {"alpha", rs.alpha},
                 {"violated", m2.violated},
                 {"tolerance", m2.tolerance},
                 {"n", 8},
                 {"m", 10},
                 {"subset", subset_json({0, 1})},
                 {"metadata", meta}};
    bunchlab::write_json_file(at("drury_summary.json"), summary);

    std::cout << "ratio=" << bunchlab::format_double(m2.ratio)
              << " perm_H=" << bunchlab::format_double(perm_h)
              << " alpha=" << bunchlab::format_double(rs.alpha) << "\n"
              << "wrote drury_{M,A,U,H,F,vmax,B05,summary}.json in " << opt.out_dir << "\n";
    return 0;
}

struct ScanOptions {
    std::string input;
    std::string output = "scan.csv";
    std::string direction = "max";
    std::string vector_path;
    double eps_min = 0.0;
    double eps_max = 2.5;
    int steps = 51;
    std::uint64_t seed = 0;
    bool drury = false;
};

int cmd_scan(const ScanOptions& opt) {
    bunchlab::CMat H;
    if (opt.drury) {
        H = build_drury_setup(opt.seed).setup.H;
    } else if (!opt.input.empty()) {
        H = bunchlab::read_matrix(opt.input);
    } else {
        throw bunchlab::ValidationError("scan: provide --input H.json or --drury");
    }

    bunchlab::CVec v;
    if (opt.direction == "max") {
        v = bunchlab::optimal_directions(H).v_max;
    } else if (opt.direction == "min") {
        v = bunchlab::optimal_directions(H).v_min;
    } else if (opt.direction == "custom") {
        if (opt.vector_path.empty())
            throw bunchlab::ValidationError("scan: --direction custom needs --vector");
        v = read_direction(opt.vector_path);
    } else {
        throw bunchlab::ValidationError("scan: unknown direction '" + opt.direction + "'");
    }

    const bunchlab::CMat delta = bunchlab::CMat::Ones(H.rows(), H.cols());
    const std::vector<double> grid = linspace(opt.eps_min, opt.eps_max, opt.steps);
    const bunchlab::ScanResult scan = bunchlab::epsilon_scan(H, v, delta, grid);
    bunchlab::write_scan_csv(opt.output, scan);

    double peak_ratio = scan.rows.front().ratio;
    for (const bunchlab::ScanRow& row : scan.rows) peak_ratio = std::max(peak_ratio, row.ratio);
    std::cout << "argmax_epsilon=" << bunchlab::format_double(scan.argmax_epsilon)
              << " peak_ratio=" << bunchlab::format_double(peak_ratio) << " rows="
              << scan.rows.size() << " -> " << opt.output << "\n";
    return 0;
}

struct CheckOptions {
    std::string input;
    std::string input_b;
    std::string output;
    double tol_override = -1.0;
};

int finish_check(bunchlab::ConjectureVerdict verdict, const CheckOptions& opt) {
    if (opt.tol_override >= 0.0) {
        verdict.tolerance = opt.tol_override;
        verdict.violated = !verdict.degenerate && verdict.margin > verdict.tolerance;
    }
    const json j = verdict_json(verdict);
    if (!opt.output.empty()) bunchlab::write_json_file(opt.output, j);
    std::cout << j.dump(2) << "\n";
    return verdict.violated ? kExitViolation : 0;
}

int cmd_check_m1(const CheckOptions& opt) {
    if (opt.input_b.empty())
        throw bunchlab::ValidationError("check-m1: needs --input A.json and --input-b B.json");
    const bunchlab::CMat A = bunchlab::read_matrix(opt.input);
    const bunchlab::CMat B = bunchlab::read_matrix(opt.input_b);
    return finish_check(bunchlab::check_m1(A, B), opt);
}

int cmd_check_m2(const CheckOptions& opt) {
    const bunchlab::CMat A = bunchlab::read_matrix(opt.input);
    return finish_check(bunchlab::check_m2(A), opt);
}

struct OracleOptions {
    std::string preset;
    std::string subset = "1";
    bool random = false;
    int n = 3;
    int m = 0;
    std::uint64_t seed = 0;
    double threshold = 1e-9;
};

int cmd_oracle_compare(const OracleOptions& opt) {
    bunchlab::Interferometer itf;
    std::vector<bunchlab::CVec> states;
    std::vector<bunchlab::Index> subset;

    if (!opt.preset.empty()) {
        itf.m = 2;
        itf.U.resize(2, 2);
        const double r = 1.0 / std::sqrt(2.0);
        itf.U << r, r, r, -r;
        bunchlab::CVec e0(2), e1(2);
        e0 << 1.0, 0.0;
        e1 << 0.0, 1.0;
        if (opt.preset == "hom") {
            states = {e0, e0};
        } else if (opt.preset == "hom-distinguishable") {
            states = {e0, e1};
        } else {
            throw bunchlab::ValidationError("oracle-compare: unknown preset '" + opt.preset +
                                            "'");
        }
        subset = {0};
    } else if (opt.random) {
        const bunchlab::Index n = opt.n;
        const bunchlab::Index m = opt.m > 0 ? opt.m : std::min<bunchlab::Index>(n + 1, 6);
        itf.m = m;
        itf.U = haar_unitary(m, opt.seed);
        std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(0x537461746573)};
        std::mt19937_64 eng(seq);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (bunchlab::Index j = 0; j < n; ++j) {
            bunchlab::CVec s(n);
            for (bunchlab::Index k = 0; k < n; ++k)
                s(k) = bunchlab::Complex(gauss(eng), gauss(eng));
            states.push_back(s / s.norm());
        }
        subset = parse_subset(opt.subset);
    } else {
        throw bunchlab::ValidationError(
            "oracle-compare: pick --preset hom|hom-distinguishable or --random");
    }

    const double oracle = bunchlab::fock_bunching_oracle(itf, subset, states);
    const bunchlab::BunchingSetup setup =
        bunchlab::h_matrix(itf, subset, static_cast<bunchlab::Index>(states.size()));
    const bunchlab::CMat S = bunchlab::gram_from_vectors(states);
    const double formula = bunchlab::bunching_probability(setup.H, S);
    const double diff = std::abs(oracle - formula);
    std::cout << "oracle=" << bunchlab::format_double(oracle)
              << " formula=" << bunchlab::format_double(formula)
              << " diff=" << bunchlab::format_double(diff) << "\n";
    return diff <= opt.threshold ? 0 : 1;
}

struct ClementsOptions {
    std::string input;
    std::string output = "mesh.json";
};

int cmd_clements(const ClementsOptions& opt) {
    const bunchlab::CMat U = bunchlab::read_matrix(opt.input);
    bunchlab::Interferometer itf;
    itf.m = U.rows();
    itf.U = U;
    const bunchlab::BeamsplitterMesh mesh = bunchlab::clements_decompose(itf);
    const bunchlab::Interferometer rebuilt = bunchlab::clements_reconstruct(mesh);
    const double err = bunchlab::max_abs(rebuilt.U - U);
    const json meta{{"round_trip_error", err},
                    {"element_count", mesh.elements.size()},
                    {"source", opt.input}};
    bunchlab::write_mesh(opt.output, mesh, meta);
    std::cout << "elements=" << mesh.elements.size()
              << " round_trip_error=" << bunchlab::format_double(err) << " -> " << opt.output
              << "\n";
    return err <= 1e-9 ? 0 : 1;
}

struct ExtendOptions {
    std::string input;
    std::string subset;
    std::string out_dir = ".";
    int n = 0;
    int m2 = 0;
    std::uint64_t seed = 0;
    bool identity = false;
};

int cmd_extend(const ExtendOptions& opt) {
    if (opt.input.empty() || opt.subset.empty() || opt.n < 1 || opt.m2 < 1)
        throw bunchlab::ValidationError("extend: needs --input, --subset, --n, --m2");
    bunchlab::Interferometer first;
    first.U = bunchlab::read_matrix(opt.input);
    first.m = first.U.rows();
    const std::vector<bunchlab::Index> k1 = parse_subset(opt.subset);
    const bunchlab::BunchingSetup base = bunchlab::h_matrix(first, k1, opt.n);

    bunchlab::Interferometer second;
    second.m = opt.m2;
    second.U = opt.identity ? bunchlab::CMat::Identity(opt.m2, opt.m2)
                            : haar_unitary(opt.m2, opt.seed);
    const bunchlab::BunchingSetup extended = bunchlab::extend_counterexample(base, second);
    const double h_error = bunchlab::max_abs(extended.H - base.H);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw bunchlab::IoError("cannot create output directory " + opt.out_dir);
    const json meta{{"seed", opt.seed}, {"command", "extend"}};
    const auto at = [&](const char* name) { return (fs::path(opt.out_dir) / name).string(); };
    bunchlab::write_matrix(at("extended_U.json"), extended.interferometer.U, meta);
    bunchlab::write_matrix(at("extended_H.json"), extended.H, meta);
    const json summary{{"m_total", extended.interferometer.m},
                       {"n", extended.n},
                       {"subset", subset_json(extended.subset)},
                       {"h_preserved_error", h_error},
                       {"identity_stage", opt.identity},
                       {"metadata", meta}};
    bunchlab::write_json_file(at("extended_summary.json"), summary);
    std::cout << "m_total=" << extended.interferometer.m << " |K2|=" << extended.subset.size()
              << " h_error=" << bunchlab::format_double(h_error) << " -> " << opt.out_dir
              << "\n";
    return h_error <= 1e-10 ? 0 : 1;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const bunchlab::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const bunchlab::SizeCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSizeCap;
    } catch (const bunchlab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const bunchlab::DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const bunchlab::RangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const bunchlab::IndexError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const bunchlab::DegenerateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bunchlab: boson bunching probabilities, permanents, and counterexamples"};
    app.require_subcommand(1);

    DruryOptions drury_opt;
    CLI::App* drury = app.add_subcommand("drury", "build the 8-photon rank-2 counterexample");
    drury->add_option("--output", drury_opt.out_dir, "output directory");
    drury->add_option("--seed", drury_opt.seed, "seed for the unitary completion");

    ScanOptions scan_opt;
    CLI::App* scan = app.add_subcommand("scan", "sweep bunching probability over epsilon");
    scan->add_option("--input", scan_opt.input, "H matrix JSON");
    scan->add_flag("--drury", scan_opt.drury, "use the built-in counterexample setup");
    scan->add_option("--output", scan_opt.output, "CSV path");
    scan->add_option("--epsilon-min", scan_opt.eps_min, "grid start");
    scan->add_option("--epsilon-max", scan_opt.eps_max, "grid end");
    scan->add_option("--steps", scan_opt.steps, "grid size");
    scan->add_option("--direction", scan_opt.direction, "max, min, or custom");
    scan->add_option("--vector", scan_opt.vector_path, "direction file for --direction custom");
    scan->add_option("--seed", scan_opt.seed, "seed (used with --drury)");

    CheckOptions m1_opt;
    CLI::App* m1 = app.add_subcommand("check-m1", "test perm(AoB) <= perm(A) prod B_ii");
    m1->add_option("--input", m1_opt.input, "A matrix JSON")->required();
    m1->add_option("--input-b", m1_opt.input_b, "B matrix JSON")->required();
    m1->add_option("--output", m1_opt.output, "verdict JSON path");
    m1->add_option("--tol", m1_opt.tol_override, "violation tolerance override");

    CheckOptions m2_opt;
    CLI::App* m2 = app.add_subcommand("check-m2", "test lambda_max(F) <= perm(A)");
    m2->add_option("--input", m2_opt.input, "A matrix JSON")->required();
    m2->add_option("--output", m2_opt.output, "verdict JSON path");
    m2->add_option("--tol", m2_opt.tol_override, "violation tolerance override");

    OracleOptions oracle_opt;
    CLI::App* oracle = app.add_subcommand("oracle-compare",
                                          "Fock-space oracle vs permanent formula");
    oracle->add_option("--preset", oracle_opt.preset, "hom or hom-distinguishable");
    oracle->add_flag("--random", oracle_opt.random, "seeded random instance");
    oracle->add_option("--n", oracle_opt.n, "photon count for --random");
    oracle->add_option("--m", oracle_opt.m, "mode count for --random");
    oracle->add_option("--subset", oracle_opt.subset, "output subset, 1-based, comma-separated");
    oracle->add_option("--seed", oracle_opt.seed, "seed for --random");
    oracle->add_option("--tol", oracle_opt.threshold, "agreement threshold");

    ClementsOptions clements_opt;
    CLI::App* clements = app.add_subcommand("clements", "decompose a unitary into a mesh");
    clements->add_option("--input", clements_opt.input, "unitary JSON")->required();
    clements->add_option("--output", clements_opt.output, "mesh JSON path");

    ExtendOptions extend_opt;
    CLI::App* extend = app.add_subcommand("extend", "append a second interferometer stage");
    extend->add_option("--input", extend_opt.input, "first-stage unitary JSON")->required();
    extend->add_option("--subset", extend_opt.subset, "first-stage output subset, 1-based")
        ->required();
    extend->add_option("--n", extend_opt.n, "photon count")->required();
    extend->add_option("--m2", extend_opt.m2, "second-stage mode count")->required();
    extend->add_option("--seed", extend_opt.seed, "seed for the random second stage");
    extend->add_flag("--identity", extend_opt.identity, "use the identity second stage");
    extend->add_option("--output", extend_opt.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (drury->parsed()) return run_guarded([&] { return cmd_drury(drury_opt); });
    if (scan->parsed()) return run_guarded([&] { return cmd_scan(scan_opt); });
    if (m1->parsed()) return run_guarded([&] { return cmd_check_m1(m1_opt); });
    if (m2->parsed()) return run_guarded([&] { return cmd_check_m2(m2_opt); });
    if (oracle->parsed()) return run_guarded([&] { return cmd_oracle_compare(oracle_opt); });
    if (clements->parsed()) return run_guarded([&] { return cmd_clements(clements_opt); });
    if (extend->parsed()) return run_guarded([&] { return cmd_extend(extend_opt); });
    return 0;
}
