// Command-line front end: build states and witnesses, run decompositions,
// evaluate MDI values, compute certification bounds, run the count-level
// Monte Carlo and emit bound-surface data as CSV or JSON.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
// 4 unphysical-regime request. Errors print a JSON object on stderr.
// Relative --out paths resolve against $MDIEW_OUTPUT_DIR when it is set.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdiew/mdiew.hpp"

using nlohmann::json;
using namespace mdiew;

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

// 17 significant digits reproduce a double exactly.
std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::filesystem::path resolve_output(const std::string& out) {
    std::filesystem::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("MDIEW_OUTPUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    return p;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    const std::filesystem::path path = resolve_output(out);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + path.string());
    f << text;
}

struct StateChoice {
    std::string family;  // werner | ghz
    double parameter = 0.0;
};

DensityMatrix build_state(const StateChoice& sc) {
    if (sc.family == "werner") return werner(sc.parameter);
    if (sc.family == "ghz") return noisy_ghz(sc.parameter);
    throw DomainError("unknown state family '" + sc.family + "' (expected werner or ghz)");
}

Witness build_witness(const StateChoice& sc) {
    if (sc.family == "werner") return werner_witness();
    if (sc.family == "ghz") return ghz_witness();
    throw DomainError("unknown state family '" + sc.family + "'");
}

std::vector<StateBasis> tetra_bases(std::size_t parties) {
    return std::vector<StateBasis>(parties, tetrahedral_basis());
}

std::string csv_scalar_table(const json& j) {
    std::string header, row;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it->is_number() && !it->is_boolean() && !it->is_string()) continue;
        if (!first) {
            header += ',';
            row += ',';
        }
        first = false;
        header += it.key();
        if (it->is_number_float())
            row += fmt17(it->get<double>());
        else if (it->is_boolean())
            row += it->get<bool>() ? "true" : "false";
        else if (it->is_string())
            row += it->get<std::string>();
        else
            row += it->dump();
    }
    return header + "\n" + row + "\n";
}

void emit_result(const json& j, const std::string& format, const std::string& out) {
    if (format == "json")
        emit(j.dump(2) + "\n", out);
    else if (format == "csv")
        emit(csv_scalar_table(j), out);
    else
        throw DomainError("unknown output format '" + format + "'");
}

int run_evaluate(const StateChoice& sc, const std::string& format, const std::string& out) {
    const DensityMatrix rho = build_state(sc);
    const Witness w = build_witness(sc);
    const WitnessDecomposition dec = decompose_witness(w, tetra_bases(rho.n_parties()));
    const double i_t = mdi_value(rho, dec);
    const double expect_over_d = expectation(w, rho) / static_cast<double>(rho.dim());
    // partial transpose on the last subsystem
    const double pt_min = min_eigenvalue(
        partial_transpose(rho.matrix(), rho.dims(), rho.n_parties() - 1));

    json j;
    j["command"] = "evaluate";
    j["state"] = sc.family;
    j["parameter"] = sc.parameter;
    j["i_true"] = i_t;
    j["expectation_over_dims"] = expect_over_d;
    j["pt_min_eigenvalue"] = pt_min;
    j["entangled"] = i_t < 0.0;
    emit_result(j, format, out);
    return 0;
}

int run_decompose(const StateChoice& sc, const std::string& format, const std::string& out) {
    const Witness w = build_witness(sc);
    const WitnessDecomposition dec = decompose_witness(w, tetra_bases(w.n_parties()));
    if (format == "csv") {
        std::string text;
        const std::size_t n = dec.n_parties();
        text += n == 2 ? "r,s,beta\n" : "r,s,u,beta\n";
        const auto shape = dec.shape();
        std::vector<std::size_t> idx;
        for (std::size_t s = 0; s < dec.beta.size(); ++s) {
            detail::decompose_index(s, shape, idx);
            for (std::size_t k = 0; k < n; ++k) text += std::to_string(idx[k]) + ",";
            text += fmt17(dec.beta[s]) + "\n";
        }
        emit(text, out);
        return 0;
    }
    json j;
    j["command"] = "decompose";
    j["witness"] = sc.family;
    j["shape"] = dec.shape();
    j["beta"] = dec.beta;
    j["residual"] = dec.residual;
    j["sum_beta"] = dec.beta_sum();
    emit_result(j, "json", out);
    return 0;
}

int run_bound(double trw, int parties, double xi_minus, double xi_plus,
              const std::string& format, const std::string& out) {
    const EfficiencyParams eff(xi_minus, xi_plus, parties);
    json j;
    j["command"] = "bound";
    j["trace_w"] = trw;
    j["n_parties"] = parties;
    j["xi_minus"] = xi_minus;
    j["xi_plus"] = xi_plus;
    j["bound"] = mdi_bound(trw, eff);
    j["bound_lost_only"] = mdi_bound(trw, EfficiencyParams(xi_minus, 1.0, parties));
    j["bound_additional_only"] = mdi_bound(trw, EfficiencyParams(1.0, xi_plus, parties));
    j["ew_bound_c0"] = ew_bound(trw / static_cast<double>(1 << parties),
                                EwEfficiencies(xi_minus, xi_plus));
    j["critical_xi_plus"] = critical_xi_plus(xi_minus);
    emit_result(j, format, out);
    return 0;
}

int run_simulate(const StateChoice& sc, double xi_minus, double xi_plus, long long n_per_setting,
                 const std::string& mode_name, std::uint64_t seed, const std::string& format,
                 const std::string& out) {
    SimulationMode mode;
    if (mode_name == "paper-exact")
        mode = SimulationMode::paper_exact;
    else if (mode_name == "stochastic")
        mode = SimulationMode::stochastic;
    else
        throw DomainError("unknown mode '" + mode_name + "' (expected paper-exact or stochastic)");

    const DensityMatrix rho = build_state(sc);
    const Witness w = build_witness(sc);
    const WitnessDecomposition dec = decompose_witness(w, tetra_bases(rho.n_parties()));
    const EfficiencyParams eff(xi_minus, xi_plus, static_cast<int>(rho.n_parties()));
    const ProbabilityTable table = protocol_probabilities(rho, dec.bases);
    const CountsRecord counts = simulate_counts(table, n_per_setting, eff, mode, seed);
    const MdiRunResult res = estimate_mdi(counts, dec, mdi_value(rho, dec));

    json j;
    j["command"] = "simulate";
    j["state"] = sc.family;
    j["parameter"] = sc.parameter;
    j["mode"] = to_string(mode);
    j["seed"] = seed;
    j["n_per_setting"] = n_per_setting;
    j["xi_minus"] = xi_minus;
    j["xi_plus"] = xi_plus;
    j["n_parties"] = eff.n_parties;
    j["i_measured"] = res.i_measured;
    j["i_true"] = res.i_true;
    j["bound"] = res.bound;
    j["certified"] = res.certified;
    j["sum_beta"] = dec.beta_sum();
    j["negative_bins"] = counts.negative_bins;
    if (res.statistical_error)
        j["statistical_error"] = *res.statistical_error;
    else
        j["statistical_error"] = nullptr;
    emit_result(j, format, out);
    return 0;
}

int run_sweep(double trw, int parties, int grid, double lo, double hi, const std::string& format,
              const std::string& out) {
    const std::vector<SweepRow> rows = sweep_surface(trw, parties, grid, lo, hi);
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            json row;
            row["xi_minus"] = r.xi_minus;
            row["xi_plus"] = r.xi_plus;
            if (r.excluded)
                row["bound"] = nullptr;
            else
                row["bound"] = r.bound;
            row["flag"] = r.excluded ? "excluded" : "ok";
            arr.push_back(row);
        }
        emit(arr.dump(2) + "\n", out);
        return 0;
    }
    std::string text = "xi_minus,xi_plus,bound,flag\n";
    for (const auto& r : rows) {
        text += fmt17(r.xi_minus) + "," + fmt17(r.xi_plus) + ",";
        text += r.excluded ? "nan" : fmt17(r.bound);
        text += r.excluded ? ",excluded\n" : ",ok\n";
    }
    emit(text, out);
    return 0;
}

json error_object(int code, const std::string& kind, const std::string& message) {
    json j;
    j["error"]["code"] = code;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement-device-independent entanglement witness toolkit"};
    app.require_subcommand(1);

    StateChoice sc;
    std::string format;  // per-subcommand default resolved after parsing
    std::string out;
    double trw = 1.0, xi_minus = 1.0, xi_plus = 1.0, lo = 0.02, hi = 1.0;
    int parties = 2, grid = 51;
    long long n_per_setting = 100000;
    std::uint64_t seed = kDefaultSeed;
    std::string mode_name = "paper-exact";

    auto add_state_opts = [&](CLI::App* cmd) {
        cmd->add_option("--state", sc.family, "State family: werner or ghz")->required();
        cmd->add_option("--p", sc.parameter, "Werner mixing parameter in [0, 1]");
        cmd->add_option("--q", sc.parameter, "GHZ mixing parameter in [0, 1]");
    };
    auto add_io_opts = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format: json or csv");
        cmd->add_option("--out", out, "Output path (default stdout); relative paths use MDIEW_OUTPUT_DIR");
    };

    CLI::App* evaluate = app.add_subcommand("evaluate", "True MDI value, PT spectrum and verdict");
    add_state_opts(evaluate);
    add_io_opts(evaluate);

    CLI::App* decompose = app.add_subcommand("decompose", "Witness expansion over tetrahedral bases");
    add_state_opts(decompose);
    add_io_opts(decompose);

    CLI::App* bound = app.add_subcommand("bound", "Certification thresholds for given efficiencies");
    bound->add_option("--trw", trw, "Witness trace")->required();
    bound->add_option("--n", parties, "Number of parties");
    bound->add_option("--xi-minus", xi_minus, "Lost-event efficiency in (0, 1]");
    bound->add_option("--xi-plus", xi_plus, "Additional-event efficiency in (0, 1]");
    add_io_opts(bound);

    CLI::App* simulate = app.add_subcommand("simulate", "Count-level Monte Carlo pipeline");
    add_state_opts(simulate);
    simulate->add_option("--xi-minus", xi_minus, "Lost-event efficiency in (0, 1]");
    simulate->add_option("--xi-plus", xi_plus, "Additional-event efficiency in (0, 1]");
    simulate->add_option("--n-per-setting", n_per_setting, "Ideal events per setting");
    simulate->add_option("--mode", mode_name, "paper-exact or stochastic");
    simulate->add_option("--seed", seed, "RNG seed");
    add_io_opts(simulate);

    CLI::App* sweep = app.add_subcommand("sweep", "Bound surface over the efficiency grid");
    sweep->add_option("--trw", trw, "Witness trace")->required();
    sweep->add_option("--n", parties, "Number of parties");
    sweep->add_option("--grid", grid, "Grid points per axis");
    sweep->add_option("--lo", lo, "Lower grid edge (exclusive of 0)");
    sweep->add_option("--hi", hi, "Upper grid edge");
    add_io_opts(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << error_object(2, "invalid-config", e.what()).dump() << "\n";
        return 2;
    }

    try {
        if (format.empty()) format = sweep->parsed() ? "csv" : "json";
        if (evaluate->parsed()) return run_evaluate(sc, format, out);
        if (decompose->parsed()) return run_decompose(sc, format, out);
        if (bound->parsed()) return run_bound(trw, parties, xi_minus, xi_plus, format, out);
        if (simulate->parsed())
            return run_simulate(sc, xi_minus, xi_plus, n_per_setting, mode_name, seed, format, out);
        if (sweep->parsed()) return run_sweep(trw, parties, grid, lo, hi, format, out);
        std::cerr << error_object(2, "invalid-config", "no subcommand").dump() << "\n";
        return 2;
    } catch (const UnphysicalRegimeError& e) {
        std::cerr << error_object(4, "unphysical-regime", e.what()).dump() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << error_object(3, "numerical-failure", e.what()).dump() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << error_object(2, "invalid-config", e.what()).dump() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << error_object(2, "invalid-config", e.what()).dump() << "\n";
        return 2;
    }
}
