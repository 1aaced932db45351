#include "uavmec/orchestrator.hpp"

#include <chrono>
#include <cmath>

#include "json.hpp"
#include "uavmec/baselines.hpp"

namespace uavmec {
namespace orchestrator {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolveReport solve(const NetworkScenario& s, const Options& opt) {
    s.validate();
    const auto channel = ChannelState::compute(s);

    SolveReport report;
    DecisionSet current = DecisionSet::initial(s);
    double objective = objective_value(s, channel, current);
    report.outer_objectives.push_back(objective);
    report.final_reference = current;

    const double accept_slack = 1e-12;

    for (int iter = 1; iter <= opt.outer_max; ++iter) {
        OuterIterate oi;
        oi.iteration = iter;

        try {
            // UTOD: task split with everything else fixed. A split change only
            // makes sense with the matching bandwidth shares, so the proposal
            // is evaluated jointly with its CRA re-solve.
            auto t0 = std::chrono::steady_clock::now();
            const auto utod_sol = utod::solve(s, channel, current);
            oi.utod_seconds = seconds_since(t0);
            if (!utod_sol.feasible()) {
                std::string users;
                for (int i : utod_sol.infeasible_users) users += " " + std::to_string(i);
                report.failure = "UTOD: user energy budget unmeetable for users:" + users;
                break;
            }
            t0 = std::chrono::steady_clock::now();
            auto with_split = [&](const std::vector<double>& split) {
                DecisionSet trial = current;
                trial.offload_bits = split;
                report.last_cra = cra::solve(s, channel, trial.offload_bits, opt.cra);
                trial.bandwidth_frac = report.last_cra.bandwidth_frac;
                return trial;
            };
            DecisionSet trial = with_split(utod_sol.offload_bits);
            double trial_obj = objective_value(s, channel, trial);
            if (trial_obj <= objective * (1.0 + accept_slack)) {
                current = trial;
                objective = trial_obj;
                oi.utod_accepted = true;
                oi.cra_accepted = true;
            } else {
                // The frozen shares misprice simultaneous entries; admit the
                // single most beneficial per-user change instead.
                int best_user = -1;
                double best_obj = objective;
                for (const auto& u : s.users) {
                    if (utod_sol.offload_bits[u.id] == current.offload_bits[u.id]) continue;
                    auto probe = current.offload_bits;
                    probe[u.id] = utod_sol.offload_bits[u.id];
                    const auto one = with_split(probe);
                    const double z = objective_value(s, channel, one);
                    if (z < best_obj) {
                        best_obj = z;
                        best_user = u.id;
                    }
                }
                if (best_user >= 0) {
                    auto probe = current.offload_bits;
                    probe[best_user] = utod_sol.offload_bits[best_user];
                    current = with_split(probe);
                    objective = best_obj;
                    oi.utod_accepted = true;
                    oi.cra_accepted = true;
                } else {
                    // keep the split, still refresh the bandwidth shares
                    trial = with_split(current.offload_bits);
                    trial_obj = objective_value(s, channel, trial);
                    if (trial_obj <= objective * (1.0 + accept_slack)) {
                        current = trial;
                        objective = trial_obj;
                        oi.cra_accepted = true;
                    }
                }
            }
            oi.cra_seconds = seconds_since(t0);

            // placement block: cross loads frozen at the current iterate
            t0 = std::chrono::steady_clock::now();
            report.final_reference = current;
            if (opt.placement == PlacementMethod::admm) {
                report.last_placement = uad::solve(s, channel, current.offload_bits,
                                                   current.bandwidth_frac, current, opt.admm);
                trial = report.last_placement.relaxed;
            } else {
                trial = baselines::centralized(s, channel, current.offload_bits,
                                               current.bandwidth_frac, current)
                            .decisions;
            }
            oi.uad_seconds = seconds_since(t0);
            trial_obj = objective_value(s, channel, trial);
            if (trial_obj <= objective * (1.0 + accept_slack)) {
                current = trial;
                objective = trial_obj;
                oi.uad_accepted = true;
            }
        } catch (const InfeasibleError& e) {
            report.failure = e.what();
            break;
        }

        oi.objective = objective;
        report.outer_trace.push_back(oi);
        const double previous = report.outer_objectives.back();
        report.outer_objectives.push_back(objective);
        report.iterations = iter;
        if (std::abs(previous - objective) <= opt.outer_tol * std::max(previous, 1e-30)) {
            report.converged = true;
            break;
        }
    }

    report.relaxed = current;
    report.relaxed_objective = objective;
    report.breakdown = evaluate(s, channel, current);
    report.energy = check_energy_budgets(s, channel, current);
    report.mean_latency_ms = objective / static_cast<double>(s.users.size()) * 1e3;
    if (report.failure.empty()) {
        try {
            report.rounded = uad::round_placements(s, channel, current);
            report.rounded_objective = objective_value(s, channel, report.rounded);
        } catch (const InfeasibleError& e) {
            report.failure = e.what();
        }
    }
    return report;
}

std::string report_to_json(const NetworkScenario& s, const SolveReport& r, bool include_timings) {
    using nlohmann::json;
    json doc;
    doc["converged"] = r.converged;
    doc["iterations"] = r.iterations;
    doc["failure"] = r.failure;
    doc["relaxed_objective_s"] = r.relaxed_objective;
    doc["rounded_objective_s"] = r.rounded_objective;
    doc["mean_latency_ms"] = r.mean_latency_ms;
    doc["outer_objectives"] = r.outer_objectives;

    json trace = json::array();
    for (const auto& it : r.outer_trace) {
        json row{{"iteration", it.iteration},
                 {"objective", it.objective},
                 {"utod_accepted", it.utod_accepted},
                 {"cra_accepted", it.cra_accepted},
                 {"uad_accepted", it.uad_accepted}};
        if (include_timings) {
            row["utod_seconds"] = it.utod_seconds;
            row["cra_seconds"] = it.cra_seconds;
            row["uad_seconds"] = it.uad_seconds;
        }
        trace.push_back(row);
    }
    doc["outer_trace"] = trace;

    auto decisions_json = [&](const DecisionSet& d) {
        json j;
        j["offload_bits"] = d.offload_bits;
        j["bandwidth_frac"] = d.bandwidth_frac;
        j["home_weight"] = d.home_weight;
        j["bs_weight"] = d.bs_weight;
        json gamma = json::array();
        for (std::size_t u = 0; u < s.users.size(); ++u) {
            json row = json::array();
            for (int w = 0; w < d.num_uavs; ++w) row.push_back(d.neighbor(static_cast<int>(u), w));
            gamma.push_back(row);
        }
        j["neighbor_weight"] = gamma;
        return j;
    };
    doc["relaxed"] = decisions_json(r.relaxed);
    doc["rounded"] = decisions_json(r.rounded);

    json users = json::array();
    for (std::size_t i = 0; i < r.breakdown.users.size(); ++i) {
        const auto& uc = r.breakdown.users[i];
        users.push_back(json{{"user", i},
                             {"t_loc", uc.t_loc},
                             {"t_up", uc.t_up},
                             {"t_off", uc.t_off},
                             {"total_latency", uc.total_latency},
                             {"e_loc", uc.e_loc},
                             {"e_up", uc.e_up},
                             {"deadline_violated", uc.deadline_violated}});
    }
    doc["per_user"] = users;

    json energy = json::array();
    auto push_constraints = [&](const std::vector<EnergyConstraint>& cs) {
        for (const auto& c : cs)
            energy.push_back(json{{"name", c.name},
                                  {"lhs", c.lhs},
                                  {"budget", c.budget},
                                  {"slack", c.slack},
                                  {"satisfied", c.satisfied},
                                  {"structural", c.structural}});
    };
    push_constraints(r.energy.user_energy);
    push_constraints(r.energy.uav_total);
    push_constraints(r.energy.neighbor_pairs);
    doc["energy_constraints"] = energy;
    doc["admm_iterations"] = r.last_placement.iterations;
    doc["admm_converged"] = r.last_placement.converged;
    return doc.dump(2);
}

}  // namespace orchestrator
}  // namespace uavmec
