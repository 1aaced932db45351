#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavmec/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace uavmec;

std::vector<int> parse_sweep(const std::string& text) {
    // "5:50:5" or "5,10,20"
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        int lo, hi, step;
        if (std::sscanf(text.c_str(), "%d:%d:%d", &lo, &hi, &step) != 3 || step <= 0)
            throw ValidationError("bad sweep '" + text + "', expected lo:hi:step");
        for (int v = lo; v <= hi; v += step) out.push_back(v);
    } else {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    }
    return out;
}

void append_summary_row(const fs::path& dir, const std::string& scheme,
                        const std::string& scenario, const orchestrator::SolveReport& r) {
    const fs::path path = dir / "runs.csv";
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (fresh)
        out << "scheme,scenario,converged,iterations,relaxed_objective_s,rounded_objective_s,"
               "mean_latency_ms\n";
    out.precision(17);
    out << scheme << "," << scenario << "," << (r.converged ? 1 : 0) << "," << r.iterations << ","
        << r.relaxed_objective << "," << r.rounded_objective << "," << r.mean_latency_ms << "\n";
}

int run_cli(int argc, char** argv) {
    CLI::App app{"collaborative UAV MEC offloading solver"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a random scenario document");
    int uavs = 10, users = 50;
    double region = 400.0;
    std::uint64_t seed = 1;
    std::string out_path = "scenario.json";
    int friis = 2;
    gen->add_option("--uavs", uavs, "number of UAVs");
    gen->add_option("--users", users, "number of users");
    gen->add_option("--region", region, "square region side (m)");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", out_path, "output scenario path");
    gen->add_option("--friis-exponent", friis, "backhaul Friis term exponent (1 or 2)")
        ->check(CLI::IsMember({1, 2}));

    // solve
    auto* solve = app.add_subcommand("solve", "run the full solver on a scenario");
    std::string scenario_path;
    std::string out_dir = "out";
    double rho = 10.0, outer_tol = 1e-4;
    int outer_max = 30;
    std::string dump_channel;
    solve->add_option("--scenario", scenario_path, "scenario document")->required();
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--rho", rho, "ADMM penalty");
    solve->add_option("--outer-tol", outer_tol, "outer relative tolerance");
    solve->add_option("--outer-max", outer_max, "outer iteration cap");
    solve->add_option("--dump-channel", dump_channel, "write the channel state CSV here");

    // baseline
    auto* base = app.add_subcommand("baseline", "run a comparison scheme on a scenario");
    std::string scheme = "greedy";
    bool full_bcd = false;
    std::uint64_t guard = 10'000'000;
    base->add_option("--scenario", scenario_path, "scenario document")->required();
    base->add_option("--scheme", scheme, "centralized|greedy|exhaustive|non_collaboration")
        ->check(CLI::IsMember({"centralized", "greedy", "exhaustive", "non_collaboration"}));
    base->add_option("--out", out_dir, "output directory");
    base->add_flag("--full-bcd", full_bcd, "centralized only: run the full BCD around the joint solve");
    base->add_option("--guard", guard, "exhaustive enumeration guard");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run the experiment families");
    std::string spec_path, users_sweep, rho_sweep, schemes_csv;
    int repeats = 10;
    exp->add_option("--spec", spec_path, "experiment spec JSON (overrides other flags)");
    exp->add_option("--out", out_dir, "output directory");
    exp->add_option("--users", users_sweep, "user sweep, lo:hi:step or comma list");
    exp->add_option("--uavs", uavs, "number of UAVs");
    exp->add_option("--rho", rho_sweep, "rho sweep, comma list");
    exp->add_option("--repeats", repeats, "seeds per point");
    exp->add_option("--seed", seed, "seed base");
    exp->add_option("--scheme", schemes_csv, "comma list of schemes");
    exp->add_option("--friis-exponent", friis, "backhaul Friis term exponent (1 or 2)")
        ->check(CLI::IsMember({1, 2}));

    // compare
    auto* cmp = app.add_subcommand("compare", "summarize a results directory");
    std::string results_dir;
    cmp->add_option("--results", results_dir, "experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        ScenarioDefaults defaults;
        defaults.radio.friis_exponent = friis;
        const auto s = generate_random(uavs, users, region, seed, defaults);
        save_scenario(s, out_path);
        std::cout << "wrote " << out_path << " (" << s.uavs.size() << " UAVs, " << s.users.size()
                  << " users)\n";
        return 0;
    }

    if (solve->parsed()) {
        const auto s = load_scenario(scenario_path);
        orchestrator::Options opt;
        opt.admm.rho = rho;
        opt.outer_tol = outer_tol;
        opt.outer_max = outer_max;
        const auto report = orchestrator::solve(s, opt);
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / "report.json") << orchestrator::report_to_json(s, report);
        append_summary_row(out_dir, "proposed", scenario_path, report);
        if (!dump_channel.empty()) {
            const auto channel = ChannelState::compute(s);
            std::ofstream(dump_channel) << channel_to_csv(s, channel);
        }
        std::cout << "converged=" << report.converged << " iterations=" << report.iterations
                  << " relaxed objective=" << report.relaxed_objective
                  << " s, mean latency=" << report.mean_latency_ms << " ms\n";
        if (!report.feasible()) {
            std::cerr << "infeasible: " << report.failure << "\n";
            return 2;
        }
        return 0;
    }

    if (base->parsed()) {
        const auto s = load_scenario(scenario_path);
        const auto channel = ChannelState::compute(s);
        orchestrator::Options opt;
        if (scheme == "centralized" && full_bcd) opt.placement = orchestrator::PlacementMethod::centralized;
        const auto proposed = orchestrator::solve(s, opt);
        if (!proposed.feasible()) {
            std::cerr << "infeasible: " << proposed.failure << "\n";
            return 2;
        }
        const auto& alpha = proposed.relaxed.offload_bits;
        const auto& beta = proposed.relaxed.bandwidth_frac;
        baselines::BaselineResult result;
        if (scheme == "centralized" && full_bcd) {
            // the BCD already used the joint solve as its placement block
            result.scheme = "centralized";
            result.decisions = proposed.relaxed;
            result.objective = proposed.relaxed_objective;
            result.mean_latency_ms = proposed.mean_latency_ms;
        } else if (scheme == "centralized") {
            result = baselines::centralized(s, channel, alpha, beta, proposed.final_reference);
        } else if (scheme == "greedy") {
            result = baselines::greedy(s, channel, alpha, beta);
        } else if (scheme == "exhaustive") {
            result = baselines::exhaustive(s, channel, alpha, beta, guard);
        } else {
            result = baselines::non_collaboration(s, channel, alpha, beta);
        }
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / ("baseline_" + scheme + ".csv"));
        out.precision(17);
        out << "scheme,objective_s,mean_latency_ms,bs_offloaded_bits,total_offloaded_bits\n"
            << result.scheme << "," << result.objective << "," << result.mean_latency_ms << ","
            << result.bs_offloaded_bits << "," << result.total_offloaded_bits << "\n";
        std::cout << result.scheme << ": objective=" << result.objective
                  << " s, mean latency=" << result.mean_latency_ms << " ms\n";
        return 0;
    }

    if (exp->parsed()) {
        harness::ExperimentSpec espec;
        if (!spec_path.empty()) {
            espec = harness::load_spec(spec_path);
        } else {
            espec.num_uavs = uavs;
            espec.repeats = repeats;
            espec.seed_base = seed;
            espec.out_dir = out_dir;
            if (!users_sweep.empty()) espec.user_sweep = parse_sweep(users_sweep);
            if (!rho_sweep.empty()) {
                espec.rho_sweep.clear();
                for (int v : parse_sweep(rho_sweep)) espec.rho_sweep.push_back(v);
            }
            if (!schemes_csv.empty()) {
                espec.schemes.clear();
                std::stringstream ss(schemes_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) espec.schemes.push_back(tok);
            }
        }
        const auto dir = harness::run(espec);
        std::cout << "results written to " << dir << "\n";
        return 0;
    }

    if (cmp->parsed()) {
        const auto comparison = harness::compare(results_dir);
        std::cout << comparison.text;
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const uavmec::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
