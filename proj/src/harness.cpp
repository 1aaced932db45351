#include "uavmec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace uavmec {
namespace harness {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
    int n = 0;
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    s.n = static_cast<int>(xs.size());
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= xs.size();
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / (xs.size() - 1));
    }
    return s;
}

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

bool wants(const ExperimentSpec& spec, const std::string& scheme) {
    return std::find(spec.schemes.begin(), spec.schemes.end(), scheme) != spec.schemes.end();
}

double mean_transmission_latency(const NetworkScenario& s, const ChannelState& ch,
                                 const std::vector<double>& alpha, const std::vector<double>& beta) {
    double total = 0.0;
    for (const auto& u : s.users) {
        if (alpha[u.id] <= 0.0) continue;
        const double r = uplink_rate(beta[u.id], s.radio.a2g_bandwidth_per_uav, ch.gamma(u.id, u.home_uav));
        if (r > 0.0) total += alpha[u.id] / r;
    }
    return total / static_cast<double>(s.users.size());
}

double mean_rate(const NetworkScenario& s, const ChannelState& ch, const std::vector<double>& beta) {
    double total = 0.0;
    for (const auto& u : s.users)
        total += uplink_rate(beta[u.id], s.radio.a2g_bandwidth_per_uav, ch.gamma(u.id, u.home_uav));
    return total / static_cast<double>(s.users.size());
}

}  // namespace

void ExperimentSpec::validate() const {
    if (repeats < 1) throw ValidationError("experiment repeats must be >= 1");
    if (user_sweep.empty()) throw ValidationError("user sweep list must not be empty");
    if (rho_sweep.empty()) throw ValidationError("rho sweep list must not be empty");
    if (num_uavs < 1) throw ValidationError("num_uavs must be >= 1");
    if (schemes.empty()) throw ValidationError("schemes list must not be empty");
}

std::string spec_to_json(const ExperimentSpec& e) {
    json doc;
    doc["id"] = e.id;
    doc["scenario_file"] = e.scenario_file;
    doc["num_uavs"] = e.num_uavs;
    doc["default_users"] = e.default_users;
    doc["region_side_m"] = e.region_side_m;
    doc["user_sweep"] = e.user_sweep;
    doc["rho_sweep"] = e.rho_sweep;
    doc["schemes"] = e.schemes;
    doc["repeats"] = e.repeats;
    doc["seed_base"] = e.seed_base;
    doc["out_dir"] = e.out_dir;
    doc["exhaustive_guard"] = e.exhaustive_guard;
    doc["solver"] = json{{"outer_tol", e.solver.outer_tol},
                         {"outer_max", e.solver.outer_max},
                         {"cra_step", e.solver.cra.step_constant},
                         {"cra_tol", e.solver.cra.tolerance},
                         {"cra_max_iter", e.solver.cra.max_iter},
                         {"rho", e.solver.admm.rho},
                         {"eps_primal", e.solver.admm.eps_primal},
                         {"eps_dual", e.solver.admm.eps_dual},
                         {"admm_max_iter", e.solver.admm.max_iter}};
    return doc.dump(2);
}

ExperimentSpec spec_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("experiment spec is not valid JSON: ") + err.what());
    }
    ExperimentSpec e;
    e.id = doc.value("id", e.id);
    e.scenario_file = doc.value("scenario_file", e.scenario_file);
    e.num_uavs = doc.value("num_uavs", e.num_uavs);
    e.default_users = doc.value("default_users", e.default_users);
    e.region_side_m = doc.value("region_side_m", e.region_side_m);
    if (doc.contains("user_sweep")) e.user_sweep = doc.at("user_sweep").get<std::vector<int>>();
    if (doc.contains("rho_sweep")) e.rho_sweep = doc.at("rho_sweep").get<std::vector<double>>();
    if (doc.contains("schemes")) e.schemes = doc.at("schemes").get<std::vector<std::string>>();
    e.repeats = doc.value("repeats", e.repeats);
    e.seed_base = doc.value("seed_base", e.seed_base);
    e.out_dir = doc.value("out_dir", e.out_dir);
    e.exhaustive_guard = doc.value("exhaustive_guard", e.exhaustive_guard);
    if (doc.contains("solver")) {
        const auto& js = doc.at("solver");
        e.solver.outer_tol = js.value("outer_tol", e.solver.outer_tol);
        e.solver.outer_max = js.value("outer_max", e.solver.outer_max);
        e.solver.cra.step_constant = js.value("cra_step", e.solver.cra.step_constant);
        e.solver.cra.tolerance = js.value("cra_tol", e.solver.cra.tolerance);
        e.solver.cra.max_iter = js.value("cra_max_iter", e.solver.cra.max_iter);
        e.solver.admm.rho = js.value("rho", e.solver.admm.rho);
        e.solver.admm.eps_primal = js.value("eps_primal", e.solver.admm.eps_primal);
        e.solver.admm.eps_dual = js.value("eps_dual", e.solver.admm.eps_dual);
        e.solver.admm.max_iter = js.value("admm_max_iter", e.solver.admm.max_iter);
    }
    e.validate();
    return e;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open experiment spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return spec_from_json(buf.str());
}

std::uint64_t config_hash(const ExperimentSpec& spec) {
    ExperimentSpec canonical = spec;
    canonical.out_dir.clear();  // the hash binds the configuration, not its destination
    return fnv1a(spec_to_json(canonical));
}

std::string run(const ExperimentSpec& spec) {
    spec.validate();
    const fs::path out_dir(spec.out_dir);
    fs::create_directories(out_dir);
    const std::string hash = std::to_string(config_hash(spec));
    std::vector<std::string> errors;

    auto scenario_at = [&](int users, std::uint64_t seed) {
        return generate_random(spec.num_uavs, users, spec.region_side_m, seed);
    };

    // --- convergence trace of the placement ADMM (default scenario) ---
    {
        NetworkScenario s = spec.scenario_file.empty()
                                ? scenario_at(spec.default_users, spec.seed_base)
                                : load_scenario(spec.scenario_file);
        const auto report = orchestrator::solve(s, spec.solver);
        std::ostringstream csv;
        csv << "iteration,objective,primal_residual,dual_residual,consensus,config_hash\n";
        for (const auto& t : report.last_placement.trace)
            csv << t.iteration << "," << fmt(t.objective) << "," << fmt(t.primal_residual) << ","
                << fmt(t.dual_residual) << "," << fmt(t.consensus) << "," << hash << "\n";
        write_file(out_dir / "admm_trace.csv", csv.str());
        if (!report.feasible()) errors.push_back("admm_trace: " + report.failure);
    }

    // --- iterations to converge versus rho ---
    {
        std::ostringstream csv;
        csv << "rho,seed,iterations,converged,config_hash\n";
        for (int rep = 0; rep < spec.repeats; ++rep) {
            const std::uint64_t seed = spec.seed_base + rep;
            NetworkScenario s = scenario_at(spec.default_users, seed);
            const auto channel = ChannelState::compute(s);
            DecisionSet d = DecisionSet::initial(s);
            const auto split = utod::solve(s, channel, d);
            if (split.feasible()) d.offload_bits = split.offload_bits;
            d.bandwidth_frac = cra::solve(s, channel, d.offload_bits, spec.solver.cra).bandwidth_frac;
            for (double rho : spec.rho_sweep) {
                auto opt = spec.solver.admm;
                opt.rho = rho;
                const auto placement = uad::solve(s, channel, d.offload_bits, d.bandwidth_frac, d, opt);
                csv << fmt(rho) << "," << seed << "," << placement.iterations << ","
                    << (placement.converged ? 1 : 0) << "," << hash << "\n";
            }
        }
        write_file(out_dir / "rho_sweep.csv", csv.str());
    }

    // --- bandwidth dual ascent trace (five-user instance) ---
    {
        NetworkScenario s = generate_random(1, 5, spec.region_side_m, spec.seed_base);
        const auto channel = ChannelState::compute(s);
        DecisionSet d = DecisionSet::initial(s);
        const auto split = utod::solve(s, channel, d);
        if (split.feasible()) d.offload_bits = split.offload_bits;
        const auto sol = cra::solve(s, channel, d.offload_bits, spec.solver.cra);
        std::ostringstream csv;
        csv << "iteration,user,beta,rate,config_hash\n";
        for (const auto& t : sol.trace)
            for (std::size_t u = 0; u < t.beta.size(); ++u)
                csv << t.iteration << "," << u << "," << fmt(t.beta[u]) << "," << fmt(t.rate[u]) << ","
                    << hash << "\n";
        write_file(out_dir / "cra_trace.csv", csv.str());
    }

    // --- sweeps over the number of users ---
    {
        std::ostringstream rate_csv, latency_csv, bs_csv;
        rate_csv << "allocator,users,mean_rate_bps,stddev_rate_bps,config_hash\n";
        latency_csv << "metric,scheme,users,mean_ms,stddev_ms,config_hash\n";
        bs_csv << "scheme,users,mean_fraction,stddev_fraction,config_hash\n";

        for (int users : spec.user_sweep) {
            std::map<std::string, std::vector<double>> rates, tx_latency, total_latency, bs_fraction;
            for (int rep = 0; rep < spec.repeats; ++rep) {
                const std::uint64_t seed = spec.seed_base + rep;
                NetworkScenario s = scenario_at(users, seed);
                const auto channel = ChannelState::compute(s);
                const auto report = orchestrator::solve(s, spec.solver);
                if (!report.feasible()) {
                    errors.push_back("sweep users=" + std::to_string(users) + " seed=" +
                                     std::to_string(seed) + ": " + report.failure);
                    continue;
                }
                const auto& alpha = report.relaxed.offload_bits;
                const auto beta_uniform = baselines::bandwidth_uniform(s);
                const auto beta_prop = baselines::bandwidth_proportional(s, alpha);
                rates["lagrangian"].push_back(mean_rate(s, channel, report.relaxed.bandwidth_frac));
                rates["uniform"].push_back(mean_rate(s, channel, beta_uniform));
                rates["proportional"].push_back(mean_rate(s, channel, beta_prop));
                tx_latency["lagrangian"].push_back(
                    1e3 * mean_transmission_latency(s, channel, alpha, report.relaxed.bandwidth_frac));
                tx_latency["uniform"].push_back(
                    1e3 * mean_transmission_latency(s, channel, alpha, beta_uniform));
                tx_latency["proportional"].push_back(
                    1e3 * mean_transmission_latency(s, channel, alpha, beta_prop));

                auto record_scheme = [&](const std::string& name, double objective, double bs_bits,
                                         double total_bits) {
                    total_latency[name].push_back(objective / users * 1e3);
                    bs_fraction[name].push_back(total_bits > 0.0 ? bs_bits / total_bits : 0.0);
                };
                double proposed_bs = 0.0, proposed_total = 0.0;
                for (const auto& u : s.users) {
                    proposed_bs += report.relaxed.bs_weight[u.id] * alpha[u.id];
                    proposed_total += alpha[u.id];
                }
                record_scheme("proposed", report.relaxed_objective, proposed_bs, proposed_total);

                const auto& beta = report.relaxed.bandwidth_frac;
                const auto& ref = report.final_reference;
                try {
                    if (wants(spec, "centralized")) {
                        const auto r = baselines::centralized(s, channel, alpha, beta, ref);
                        record_scheme(r.scheme, r.objective, r.bs_offloaded_bits, r.total_offloaded_bits);
                    }
                    if (wants(spec, "greedy")) {
                        const auto r = baselines::greedy(s, channel, alpha, beta);
                        record_scheme(r.scheme, r.objective, r.bs_offloaded_bits, r.total_offloaded_bits);
                    }
                    if (wants(spec, "non_collaboration")) {
                        const auto r = baselines::non_collaboration(s, channel, alpha, beta);
                        record_scheme(r.scheme, r.objective, r.bs_offloaded_bits, r.total_offloaded_bits);
                    }
                    if (wants(spec, "exhaustive")) {
                        const double count =
                            std::pow(static_cast<double>(spec.num_uavs + 1), static_cast<double>(users));
                        if (count <= static_cast<double>(spec.exhaustive_guard)) {
                            const auto r = baselines::exhaustive(s, channel, alpha, beta,
                                                                 spec.exhaustive_guard);
                            record_scheme(r.scheme, r.objective, r.bs_offloaded_bits,
                                          r.total_offloaded_bits);
                        }
                    }
                } catch (const std::exception& e) {
                    errors.push_back("baseline at users=" + std::to_string(users) + " seed=" +
                                     std::to_string(seed) + ": " + e.what());
                }
            }
            for (const auto& [allocator, values] : rates) {
                const auto st = stats_of(values);
                rate_csv << allocator << "," << users << "," << fmt(st.mean) << "," << fmt(st.stddev)
                         << "," << hash << "\n";
            }
            for (const auto& [allocator, values] : tx_latency) {
                const auto st = stats_of(values);
                latency_csv << "transmission," << allocator << "," << users << "," << fmt(st.mean)
                            << "," << fmt(st.stddev) << "," << hash << "\n";
            }
            for (const auto& [scheme, values] : total_latency) {
                const auto st = stats_of(values);
                latency_csv << "total," << scheme << "," << users << "," << fmt(st.mean) << ","
                            << fmt(st.stddev) << "," << hash << "\n";
            }
            for (const auto& [scheme, values] : bs_fraction) {
                const auto st = stats_of(values);
                bs_csv << scheme << "," << users << "," << fmt(st.mean) << "," << fmt(st.stddev) << ","
                       << hash << "\n";
            }
        }
        write_file(out_dir / "rate_vs_users.csv", rate_csv.str());
        write_file(out_dir / "latency_vs_users.csv", latency_csv.str());
        write_file(out_dir / "bs_offload.csv", bs_csv.str());
    }

    // --- fixed 3-UAV / 10-user comparison ---
    {
        std::ostringstream csv;
        csv << "scheme,seed,objective_s,mean_latency_ms,bs_offloaded_bits,config_hash\n";
        for (int rep = 0; rep < spec.repeats; ++rep) {
            const std::uint64_t seed = spec.seed_base + rep;
            NetworkScenario s = generate_random(3, 10, spec.region_side_m, seed);
            const auto channel = ChannelState::compute(s);
            const auto report = orchestrator::solve(s, spec.solver);
            if (!report.feasible()) {
                errors.push_back("fixed_instance seed=" + std::to_string(seed) + ": " + report.failure);
                continue;
            }
            double proposed_bs = 0.0;
            for (const auto& u : s.users)
                proposed_bs += report.relaxed.bs_weight[u.id] * report.relaxed.offload_bits[u.id];
            csv << "proposed," << seed << "," << fmt(report.relaxed_objective) << ","
                << fmt(report.mean_latency_ms) << "," << fmt(proposed_bs) << "," << hash << "\n";
            const auto& alpha = report.relaxed.offload_bits;
            const auto& beta = report.relaxed.bandwidth_frac;
            try {
                std::vector<baselines::BaselineResult> results;
                if (wants(spec, "centralized"))
                    results.push_back(baselines::centralized(s, channel, alpha, beta, report.final_reference));
                if (wants(spec, "exhaustive"))
                    results.push_back(baselines::exhaustive(s, channel, alpha, beta, spec.exhaustive_guard));
                if (wants(spec, "greedy")) results.push_back(baselines::greedy(s, channel, alpha, beta));
                if (wants(spec, "non_collaboration"))
                    results.push_back(baselines::non_collaboration(s, channel, alpha, beta));
                for (const auto& r : results)
                    csv << r.scheme << "," << seed << "," << fmt(r.objective) << ","
                        << fmt(r.mean_latency_ms) << "," << fmt(r.bs_offloaded_bits) << "," << hash
                        << "\n";
            } catch (const std::exception& e) {
                errors.push_back("fixed_instance seed=" + std::to_string(seed) + ": " + e.what());
            }
        }
        write_file(out_dir / "fixed_instance.csv", csv.str());
    }

    // --- summary ---
    {
        json doc;
        doc["id"] = spec.id;
        doc["config_hash"] = hash;
        doc["spec"] = json::parse(spec_to_json(spec));
        doc["seeds"] = json::array();
        for (int rep = 0; rep < spec.repeats; ++rep) doc["seeds"].push_back(spec.seed_base + rep);
        doc["errors"] = errors;
#if defined(__clang__)
        doc["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
        doc["compiler"] = std::string("gcc ") + std::to_string(__GNUC__) + "." +
                          std::to_string(__GNUC_MINOR__);
#else
        doc["compiler"] = "unknown";
#endif
        write_file(out_dir / "summary.json", doc.dump(2) + "\n");
    }
    return out_dir.string();
}

Comparison compare(const std::string& results_dir) {
    const fs::path path = fs::path(results_dir) / "fixed_instance.csv";
    std::ifstream in(path);
    if (!in) throw ValidationError("missing " + path.string() + "; run the experiment first");

    std::map<std::string, std::vector<double>> latencies;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() < 5) throw ParseError("malformed row in fixed_instance.csv: " + line);
        latencies[cols[0]].push_back(std::stod(cols[3]));
    }
    if (!latencies.count("proposed"))
        throw ValidationError("fixed_instance.csv has no 'proposed' scheme column");

    Comparison cmp;
    const double proposed = stats_of(latencies["proposed"]).mean;
    for (const auto& [scheme, values] : latencies) {
        SchemeStats st;
        st.scheme = scheme;
        st.mean_latency_ms = stats_of(values).mean;
        st.gap_vs_proposed_pct = proposed > 0.0 ? (st.mean_latency_ms - proposed) / proposed * 100.0 : 0.0;
        st.samples = static_cast<int>(values.size());
        cmp.stats.push_back(st);
    }
    std::sort(cmp.stats.begin(), cmp.stats.end(),
              [](const SchemeStats& a, const SchemeStats& b) { return a.mean_latency_ms < b.mean_latency_ms; });

    auto mean_of = [&](const std::string& scheme) -> double {
        auto it = latencies.find(scheme);
        if (it == latencies.end()) return std::numeric_limits<double>::quiet_NaN();
        return stats_of(it->second).mean;
    };
    const double exhaustive = mean_of("exhaustive");
    const double greedy = mean_of("greedy");
    const double noncollab = mean_of("non_collaboration");
    const double centralized = mean_of("centralized");
    cmp.ordering_ok = !std::isnan(exhaustive) && !std::isnan(greedy) && !std::isnan(noncollab) &&
                      proposed <= exhaustive + 1e-9 && exhaustive <= greedy + 1e-9 &&
                      greedy <= noncollab + 1e-9;
    cmp.centralized_close =
        !std::isnan(centralized) && std::abs(proposed - centralized) <= 0.01 * centralized;

    std::ostringstream text, csv;
    csv << "scheme,mean_latency_ms,gap_vs_proposed_pct,samples\n";
    text << "scheme                mean latency (ms)   gap vs proposed\n";
    for (const auto& st : cmp.stats) {
        csv << st.scheme << "," << fmt(st.mean_latency_ms) << "," << fmt(st.gap_vs_proposed_pct) << ","
            << st.samples << "\n";
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-20s %18.3f %+15.2f%%\n", st.scheme.c_str(),
                      st.mean_latency_ms, st.gap_vs_proposed_pct);
        text << buf;
    }
    text << (cmp.ordering_ok ? "PASS" : "FAIL")
         << ": ordering proposed <= exhaustive <= greedy <= non_collaboration\n";
    text << (cmp.centralized_close ? "PASS" : "FAIL") << ": proposed within 1% of centralized\n";
    cmp.text = text.str();
    write_file(fs::path(results_dir) / "comparison.csv", csv.str());
    return cmp;
}

}  // namespace harness
}  // namespace uavmec
