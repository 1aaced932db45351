#include "uavmec/uad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifndef UAVMEC_SCALE_DIV
#define UAVMEC_SCALE_DIV 8.0
#endif
#include <numeric>

namespace uavmec {
namespace uad {

namespace {

constexpr double kProjectionTol = 1e-12;
constexpr double kDescentTol = 1e-9;

double project_onto_halfspace(std::vector<double>& x, const Halfspace& h,
                              const std::vector<double>& w) {
    double dot = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += h.coeff[i] * x[i];
        norm += h.coeff[i] * h.coeff[i] / w[i];
    }
    if (dot <= h.rhs || norm <= 0.0) return 0.0;
    const double mu = (dot - h.rhs) / norm;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= mu * h.coeff[i] / w[i];
    return mu;
}

void check_nonempty(const FeasibleSet& set) {
    auto floor_of = [&](const Halfspace& h) {
        double lo = 0.0;
        for (double c : h.coeff) lo += std::min(0.0, c);  // box corner minimizing a.x
        return lo;
    };
    if (set.capacity && floor_of(*set.capacity) > set.capacity->rhs + 1e-12)
        throw InfeasibleError("feasible set is empty: " + set.capacity->name);
    if (set.energy && floor_of(*set.energy) > set.energy->rhs + 1e-12)
        throw InfeasibleError("feasible set is empty: " + set.energy->name);
}

}  // namespace

std::vector<double> project_feasible(const std::vector<double>& point, const FeasibleSet& set,
                                     const std::vector<double>& weights) {
    check_nonempty(set);
    const std::size_t n = point.size();
    std::vector<double> w = weights.empty() ? std::vector<double>(n, 1.0) : weights;

    auto clip = [](std::vector<double>& x) {
        for (double& v : x) v = std::clamp(v, 0.0, 1.0);
    };

    std::vector<double> x = point;
    clip(x);
    auto satisfied = [&](const std::optional<Halfspace>& h) {
        if (!h) return true;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += h->coeff[i] * x[i];
        return dot <= h->rhs + kProjectionTol * std::max(1.0, std::abs(h->rhs));
    };
    if (satisfied(set.capacity) && satisfied(set.energy)) return x;

    // Dykstra over {box, capacity, energy} in the weighted norm.
    x = point;
    std::vector<std::vector<double>> corrections(3, std::vector<double>(n, 0.0));
    for (int sweep = 0; sweep < 20000; ++sweep) {
        double change = 0.0;
        for (int c = 0; c < 3; ++c) {
            std::vector<double> y = x;
            for (std::size_t i = 0; i < n; ++i) y[i] += corrections[c][i];
            std::vector<double> z = y;
            if (c == 0) {
                clip(z);
            } else if (c == 1) {
                if (set.capacity) project_onto_halfspace(z, *set.capacity, w);
            } else {
                if (set.energy) project_onto_halfspace(z, *set.energy, w);
            }
            for (std::size_t i = 0; i < n; ++i) {
                corrections[c][i] = y[i] - z[i];
                change = std::max(change, std::abs(z[i] - x[i]));
                x[i] = z[i];
            }
        }
        if (change <= kProjectionTol) break;
    }
    clip(x);
    return x;
}

std::vector<double> AdmmState::consensus_sum() const {
    std::vector<double> sum(dual.size(), 0.0);
    for (const auto& block : blocks)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += block[i];
    return sum;
}

std::vector<UavProblem> build_problems(const NetworkScenario& s, const FrozenCostModel& model,
                                       const StructuralFlags& flags, const DecisionSet& reference,
                                       const CostBreakdown& reference_costs) {
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int num_sites = num_uavs + 1;

    // Normalization puts the coefficients on the O(1) scale the published
    // penalty range presumes. It also caps the normalized self-congestion
    // curvature: one user's worst-site ADMM contraction factor is
    // 2d/(2d + rho), so d is kept at or below ~2 for every (user, site).
    double scale = 0.0;
    double max_quad = 0.0;
    int counted = 0;
    for (const auto& u : s.users) {
        if (reference.offload_bits[u.id] <= 0.0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int site = 0; site < num_sites; ++site) {
            best = std::min(best, model.chain_what_if(u.id, site));
            max_quad = std::max(max_quad, model.self_quad[model.site(u.id, site)]);
        }
        if (std::isfinite(best) && best > 0.0) {
            scale += best;
            ++counted;
        }
    }
    scale = counted > 0 ? scale / counted : 1.0;
    // Normalized curvature well above the published penalty range keeps the
    // per-site block contraction improving across rho in [1, 15]; much
    // smaller curvature lets the consensus close before the objective has
    // been optimized (observed as premature stops with wildly suboptimal
    // placements).
    scale /= 32.0;
    if (!(scale > 0.0)) scale = 1.0;

    std::vector<UavProblem> problems;
    for (const auto& v : s.uavs) {
        // only users with offloaded work participate; a zero-alpha placement
        // carries no load and is pinned to the home UAV by the caller
        std::vector<int> users;
        for (int i : s.users_of(v.id))
            if (reference.offload_bits[i] > 0.0) users.push_back(i);
        if (users.empty()) continue;
        UavProblem p;
        p.home_uav = v.id;
        p.users = users;
        p.num_sites = num_sites;
        p.scale = scale;
        const int n = static_cast<int>(users.size());
        p.lin.resize(n * num_sites);
        p.quad.resize(n * num_sites);
        for (int local = 0; local < n; ++local) {
            for (int site = 0; site < num_sites; ++site) {
                const int k = model.site(users[local], site);
                p.lin[p.at(local, site)] = model.chain_const[k] / scale;
                p.quad[p.at(local, site)] = model.self_quad[k] / scale;
            }
        }

        p.omega.resize(num_sites);
        for (int site = 0; site < num_sites; ++site) {
            FeasibleSet& omega = p.omega[site];
            omega.dim = n;
            // Proportional allocation satisfies the per-site capacity bound by
            // construction (the Eq. 16 shares sum to F_max), so only the box
            // and the enforceable energy halfspaces shape the set.
            if (site == num_uavs) continue;
            const auto& target = s.uavs[site];

            if (site == v.id) {
                if (!flags.uav_total[v.id]) {
                    Halfspace en;
                    en.coeff.resize(n);
                    for (int local = 0; local < n; ++local) {
                        const auto& u = s.users[users[local]];
                        const double share = model.frozen_share[model.site(u.id, site)];
                        en.coeff[local] = v.chip_constant * share * share * u.task.cycles_per_bit *
                                          reference.offload_bits[u.id];
                    }
                    const auto& rc = reference_costs.uavs[v.id];
                    en.rhs = v.energy_budget - rc.e_fwd_a2a - rc.e_fwd_bs - rc.e_hov;
                    en.name = "uav " + std::to_string(v.id) + " energy budget";
                    omega.energy = std::move(en);
                }
            } else if (!flags.pair(v.id, site, num_uavs)) {
                Halfspace en;
                en.coeff.resize(n);
                for (int local = 0; local < n; ++local) {
                    const auto& u = s.users[users[local]];
                    const int k = model.site(u.id, site);
                    const double share = model.frozen_share[k];
                    const double alpha = reference.offload_bits[u.id];
                    const double t_comp =
                        u.task.cycles_per_bit * (model.other_load[k] + alpha) / target.cpu_capacity;
                    // positive-hull bound of the hover max: exact when at most
                    // one user is forwarded on the link
                    en.coeff[local] =
                        target.chip_constant * share * share * u.task.cycles_per_bit * alpha +
                        hover_power(target.hover) * t_comp;
                }
                en.rhs = target.energy_budget;
                en.name = "uav " + std::to_string(site) + " energy budget (tasks forwarded from uav " +
                          std::to_string(v.id) + ")";
                omega.energy = std::move(en);
            }
        }
        problems.push_back(std::move(p));
    }
    return problems;
}

FrozenPlacementProgram build_program(const NetworkScenario& s, const ChannelState& ch,
                                     const std::vector<double>& alpha,
                                     const std::vector<double>& beta, const DecisionSet& reference) {
    FrozenPlacementProgram prog;
    prog.reference = reference;
    prog.reference.offload_bits = alpha;
    prog.reference.bandwidth_frac = beta;
    prog.model = FrozenCostModel::build(s, ch, alpha, beta, prog.reference);
    prog.flags = structural_energy_flags(s, ch, alpha, beta);
    const auto ref_costs = evaluate(s, ch, prog.reference);
    prog.problems = build_problems(s, prog.model, prog.flags, prog.reference, ref_costs);
    return prog;
}

double FrozenPlacementProgram::objective(const NetworkScenario& s, const DecisionSet& d) const {
    double value = 0.0;
    const int num_uavs = static_cast<int>(s.uavs.size());
    for (const auto& p : problems) {
        for (std::size_t local = 0; local < p.users.size(); ++local) {
            const int u = p.users[local];
            for (int site = 0; site < p.num_sites; ++site) {
                double x;
                if (site == num_uavs)
                    x = d.bs_weight[u];
                else if (site == p.home_uav)
                    x = d.home_weight[u];
                else
                    x = d.neighbor(u, site);
                const int k = p.at(static_cast<int>(local), site);
                value += (p.lin[k] * x + p.quad[k] * x * x) * p.scale;
            }
        }
    }
    return value;
}

std::vector<double> block_update(const UavProblem& p, int site, const std::vector<double>& rest,
                                 const std::vector<double>& dual, double rho) {
    const int n = static_cast<int>(p.users.size());
    std::vector<double> target(n), weight(n);
    for (int local = 0; local < n; ++local) {
        const double c = p.lin[p.at(local, site)];
        const double d = p.quad[p.at(local, site)];
        weight[local] = 2.0 * d + rho;
        target[local] = (rho * (1.0 - rest[local]) - c - dual[local]) / weight[local];
    }
    return project_feasible(target, p.omega[site], weight);
}

void dual_update(const UavProblem& p, AdmmState& state, double rho) {
    const auto sum = state.consensus_sum();
    for (std::size_t i = 0; i < state.dual.size(); ++i)
        state.dual[i] += rho * (sum[i] - 1.0);
    (void)p;
}

double augmented_lagrangian(const UavProblem& p, const AdmmState& state, double rho) {
    const int n = static_cast<int>(p.users.size());
    double value = 0.0;
    for (int site = 0; site < p.num_sites; ++site) {
        const auto& x = state.blocks[site];
        for (int local = 0; local < n; ++local)
            value += p.lin[p.at(local, site)] * x[local] + p.quad[p.at(local, site)] * x[local] * x[local];
    }
    const auto sum = state.consensus_sum();
    for (int local = 0; local < n; ++local) {
        const double r = sum[local] - 1.0;
        value += state.dual[local] * r + 0.5 * rho * r * r;
    }
    return value;
}

namespace {

/// One ADMM iteration for a single UAV's program. Updates blocks in the
/// order theta -> each gamma_w -> phi, then the dual.
void iterate_problem(const UavProblem& p, AdmmState& state, double rho, bool& monotone) {
    const int n = static_cast<int>(p.users.size());
    const int bs = p.num_sites - 1;

    auto rest_for = [&](int site) {
        auto rest = state.consensus_sum();
        for (int i = 0; i < n; ++i) rest[i] -= state.blocks[site][i];
        return rest;
    };
    auto stage_value = [&] { return augmented_lagrangian(p, state, rho); };

    double before = stage_value();
    state.blocks[p.home_uav] = block_update(p, p.home_uav, rest_for(p.home_uav), state.dual, rho);
    double after = stage_value();
    if (after > before + kDescentTol * std::max(1.0, std::abs(before))) monotone = false;

    // gamma stage: neighbor blocks in ascending id order, each against the
    // latest iterate. Joint application of the parallel-form proposals
    // overshoots the consensus sum and cycles, so the sequential order is
    // the one that actually realizes the descent the update is meant to give.
    before = after;
    for (int site = 0; site < p.num_sites; ++site) {
        if (site == p.home_uav || site == bs) continue;
        state.blocks[site] = block_update(p, site, rest_for(site), state.dual, rho);
    }
    after = stage_value();
    if (after > before + kDescentTol * std::max(1.0, std::abs(before))) monotone = false;

    before = after;
    state.blocks[bs] = block_update(p, bs, rest_for(bs), state.dual, rho);
    after = stage_value();
    if (after > before + kDescentTol * std::max(1.0, std::abs(before))) monotone = false;

    dual_update(p, state, rho);
}

}  // namespace

namespace {

/// One frozen-program ADMM solve (Algorithm 2 proper).
PlacementSolution solve_frozen(const NetworkScenario& s, const ChannelState& ch,
                               const std::vector<double>& alpha, const std::vector<double>& beta,
                               const DecisionSet& reference, const AdmmOptions& opt) {
    const auto program = build_program(s, ch, alpha, beta, reference);
    const auto& problems = program.problems;

    std::vector<AdmmState> states(problems.size());
    for (std::size_t k = 0; k < problems.size(); ++k) {
        const int n = static_cast<int>(problems[k].users.size());
        states[k].blocks.assign(problems[k].num_sites, std::vector<double>(n, 0.0));
        states[k].dual.assign(n, 0.0);
    }

    PlacementSolution out;
    auto stacked_sums = [&] {
        std::vector<double> all;
        for (std::size_t k = 0; k < problems.size(); ++k) {
            const auto sum = states[k].consensus_sum();
            all.insert(all.end(), sum.begin(), sum.end());
        }
        return all;
    };
    auto stacked_duals = [&] {
        std::vector<double> all;
        for (const auto& st : states) all.insert(all.end(), st.dual.begin(), st.dual.end());
        return all;
    };
    auto norm_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double sq = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(sq);
    };

    std::vector<double> prev_sum = stacked_sums();
    std::vector<double> prev_dual = stacked_duals();

    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        bool monotone = true;
        for (std::size_t k = 0; k < problems.size(); ++k) {
            states[k].iteration = iter;
            iterate_problem(problems[k], states[k], opt.rho, monotone);
        }
        const auto sum = stacked_sums();
        const auto dual = stacked_duals();

        TracePoint t;
        t.iteration = iter;
        double obj = 0.0;
        for (std::size_t k = 0; k < problems.size(); ++k) {
            const auto& p = problems[k];
            for (int site = 0; site < p.num_sites; ++site)
                for (std::size_t local = 0; local < p.users.size(); ++local) {
                    const double x = states[k].blocks[site][local];
                    obj += (p.lin[p.at(static_cast<int>(local), site)] * x +
                            p.quad[p.at(static_cast<int>(local), site)] * x * x) *
                           p.scale;
                }
        }
        t.objective = obj;
        t.primal_residual = norm_diff(sum, prev_sum);
        t.dual_residual = norm_diff(dual, prev_dual);
        double cons = 0.0;
        for (double v : sum) cons += (v - 1.0) * (v - 1.0);
        t.consensus = std::sqrt(cons);
        t.monotone = monotone;
        out.trace.push_back(t);
        out.lagrangian_monotone = out.lagrangian_monotone && monotone;
        out.iterations = iter;

        const bool stop = t.primal_residual <= opt.eps_primal && t.dual_residual <= opt.eps_dual;
        prev_sum = sum;
        prev_dual = dual;
        if (stop) {
            out.converged = true;
            break;
        }
    }

    // assemble the relaxed decision set; zero-load users sit at home
    out.relaxed = DecisionSet::zeros(s);
    out.relaxed.offload_bits = alpha;
    out.relaxed.bandwidth_frac = beta;
    for (const auto& u : s.users)
        if (alpha[u.id] <= 0.0) out.relaxed.home_weight[u.id] = 1.0;
    const int num_uavs = static_cast<int>(s.uavs.size());
    for (std::size_t k = 0; k < problems.size(); ++k) {
        const auto& p = problems[k];
        for (std::size_t local = 0; local < p.users.size(); ++local) {
            const int u = p.users[local];
            out.relaxed.home_weight[u] = states[k].blocks[p.home_uav][local];
            for (int site = 0; site < num_uavs; ++site)
                if (site != p.home_uav) out.relaxed.neighbor(u, site) = states[k].blocks[site][local];
            out.relaxed.bs_weight[u] = states[k].blocks[num_uavs][local];
        }
    }
    out.surrogate_objective = out.trace.empty() ? 0.0 : out.trace.back().objective;
    out.relaxed_objective = objective_value(s, ch, out.relaxed);
    return out;
}

}  // namespace

PlacementSolution solve(const NetworkScenario& s, const ChannelState& ch,
                        const std::vector<double>& alpha, const std::vector<double>& beta,
                        const DecisionSet& reference, const AdmmOptions& opt) {
    // The frozen cross-loads misprice placements that move several users at
    // once; refreezing at the latest placement and re-solving drives the
    // result to a point that is stationary under its own loads. The accepted
    // refreeze must not increase the authoritative objective.
    PlacementSolution out = solve_frozen(s, ch, alpha, beta, reference, opt);
    for (int pass = 1; pass < opt.refreeze_passes; ++pass) {
        auto next = solve_frozen(s, ch, alpha, beta, out.relaxed, opt);
        if (!(next.relaxed_objective < out.relaxed_objective * (1.0 - 1e-9))) break;
        next.iterations = std::max(next.iterations, out.iterations);
        next.lagrangian_monotone = next.lagrangian_monotone && out.lagrangian_monotone;
        out = std::move(next);
    }
    out.rounded = round_placements(s, ch, out.relaxed, &out.repair_log);
    out.rounded_objective = objective_value(s, ch, out.rounded);
    return out;
}

// --- binary placements ---------------------------------------------------------

DecisionSet assignment_to_decisions(const NetworkScenario& s, const std::vector<double>& alpha,
                                    const std::vector<double>& beta, const Assignment& assignment) {
    DecisionSet d = DecisionSet::zeros(s);
    d.offload_bits = alpha;
    d.bandwidth_frac = beta;
    const int bs = bs_site(s);
    for (const auto& u : s.users) {
        const int site = assignment[u.id];
        if (site < 0) continue;
        if (site == bs)
            d.bs_weight[u.id] = 1.0;
        else if (site == u.home_uav)
            d.home_weight[u.id] = 1.0;
        else
            d.neighbor(u.id, site) = 1.0;
    }
    return d;
}

AssignmentEval evaluate_assignment(const NetworkScenario& s, const ChannelState& ch,
                                   const std::vector<double>& alpha,
                                   const std::vector<double>& beta, const Assignment& assignment,
                                   const StructuralFlags& flags) {
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int bs = num_uavs;
    AssignmentEval out;
    out.feasible = true;

    std::vector<double> pool(num_uavs + 1, 0.0);
    for (const auto& u : s.users) {
        const int site = assignment[u.id];
        if (site >= 0) pool[site] += alpha[u.id];
    }

    std::vector<double> hover_makespan(num_uavs, 0.0);
    std::vector<double> e_comp_home(num_uavs, 0.0);
    std::vector<double> fwd_bits(num_uavs * num_uavs, 0.0);
    std::vector<double> bs_bits(num_uavs, 0.0);
    // per (v,w): forwarded compute energy and hover of the forwarded work
    std::vector<double> pair_energy(num_uavs * num_uavs, 0.0);
    std::vector<double> pair_hover(num_uavs * num_uavs, 0.0);

    for (const auto& u : s.users) {
        const int i = u.id;
        const int site = assignment[i];
        if (site < 0) continue;
        const int v = u.home_uav;
        const double a = alpha[i];
        const double C = u.task.cycles_per_bit;

        double z = local_cost(u, a).time;
        double t_up = 0.0;
        if (a > 0.0) {
            const double rate = uplink_rate(beta[i], s.radio.a2g_bandwidth_per_uav, ch.gamma(i, v));
            if (!(rate > 0.0)) {
                out.feasible = false;
                out.violated = "user " + std::to_string(i) + " has zero uplink rate";
                return out;
            }
            t_up = a / rate;
            double branch = 0.0;
            if (site == v) {
                branch = C * pool[v] / s.uavs[v].cpu_capacity;
                const double share = a * s.uavs[v].cpu_capacity / pool[v];
                e_comp_home[v] += s.uavs[v].chip_constant * share * share * C * a;
                z += t_up + branch;
            } else if (site == bs) {
                const double link = a / ch.bs_rate[v];
                branch = link + C * pool[bs] / s.bs.cpu_capacity;
                bs_bits[v] += a;
                z += t_up + branch;
            } else {
                const double link = a / ch.rate_a2a(v, site);
                const double t_comp = C * pool[site] / s.uavs[site].cpu_capacity;
                branch = link + t_comp;
                fwd_bits[v * num_uavs + site] += a;
                const double share = a * s.uavs[site].cpu_capacity / pool[site];
                pair_energy[v * num_uavs + site] +=
                    s.uavs[site].chip_constant * share * share * C * a;
                pair_hover[v * num_uavs + site] = std::max(pair_hover[v * num_uavs + site], t_comp);
                z += t_up + branch;
            }
            hover_makespan[v] = std::max(hover_makespan[v], t_up + branch);
        }
        out.objective += z;
    }

    const double tol = 1e-9;
    for (const auto& v : s.uavs) {
        double e_total = e_comp_home[v.id];
        for (int w = 0; w < num_uavs; ++w) {
            if (w == v.id) continue;
            const double bits = fwd_bits[v.id * num_uavs + w];
            if (bits > 0.0) e_total += v.tx_power_a2a * bits / ch.rate_a2a(v.id, w);
        }
        if (bs_bits[v.id] > 0.0) e_total += v.tx_power_backhaul * bs_bits[v.id] / ch.bs_rate[v.id];
        e_total += hover_power(v.hover) * hover_makespan[v.id];
        if (!flags.uav_total[v.id] && e_total > v.energy_budget + tol * std::max(1.0, v.energy_budget)) {
            out.feasible = false;
            out.violated = "uav " + std::to_string(v.id) + " energy budget";
            return out;
        }
    }
    for (int v = 0; v < num_uavs; ++v) {
        for (int w = 0; w < num_uavs; ++w) {
            if (v == w || flags.pair(v, w, num_uavs)) continue;
            const double lhs = pair_energy[v * num_uavs + w] +
                               hover_power(s.uavs[w].hover) * pair_hover[v * num_uavs + w];
            if (lhs > s.uavs[w].energy_budget + tol * std::max(1.0, s.uavs[w].energy_budget)) {
                out.feasible = false;
                out.violated = "uav " + std::to_string(w) + " energy budget (tasks forwarded from uav " +
                               std::to_string(v) + ")";
                return out;
            }
        }
    }
    return out;
}

DecisionSet round_placements(const NetworkScenario& s, const ChannelState& ch,
                             const DecisionSet& relaxed, std::vector<std::string>* repair_log) {
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int bs = num_uavs;
    const auto& alpha = relaxed.offload_bits;
    const auto& beta = relaxed.bandwidth_frac;
    const auto flags = structural_energy_flags(s, ch, alpha, beta);

    auto weight_of = [&](int user, int site) {
        if (site == bs) return relaxed.bs_weight[user];
        if (s.users[user].home_uav == site) return relaxed.home_weight[user];
        return relaxed.neighbor(user, site);
    };

    // users in descending order of their strongest relaxed weight
    std::vector<int> order(s.users.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> top(s.users.size(), 0.0);
    for (const auto& u : s.users)
        for (int site = 0; site <= num_uavs; ++site)
            top[u.id] = std::max(top[u.id], weight_of(u.id, site));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return top[a] > top[b]; });

    Assignment assignment(s.users.size(), -1);
    std::vector<double> pool(num_uavs + 1, 0.0);

    for (int user : order) {
        const auto& u = s.users[user];
        // candidate sites: weight desc, then what-if composite latency asc,
        // then site index
        std::vector<int> sites(num_uavs + 1);
        std::iota(sites.begin(), sites.end(), 0);
        std::vector<double> chain(num_uavs + 1, 0.0);
        if (alpha[user] > 0.0) {
            const double rate =
                uplink_rate(beta[user], s.radio.a2g_bandwidth_per_uav, ch.gamma(user, u.home_uav));
            const double t_up = rate > 0.0 ? alpha[user] / rate : std::numeric_limits<double>::infinity();
            const double C = u.task.cycles_per_bit;
            for (int site = 0; site <= num_uavs; ++site) {
                double link = 0.0;
                double cap = site == bs ? s.bs.cpu_capacity : s.uavs[site].cpu_capacity;
                if (site == bs)
                    link = alpha[user] / ch.bs_rate[u.home_uav];
                else if (site != u.home_uav)
                    link = alpha[user] / ch.rate_a2a(u.home_uav, site);
                chain[site] = t_up + link + C * (pool[site] + alpha[user]) / cap;
            }
        }
        std::stable_sort(sites.begin(), sites.end(), [&](int a, int b) {
            const double wa = weight_of(user, a), wb = weight_of(user, b);
            if (wa != wb) return wa > wb;
            if (chain[a] != chain[b]) return chain[a] < chain[b];
            return a < b;
        });

        bool placed = false;
        for (int site : sites) {
            assignment[user] = site;
            const auto eval = evaluate_assignment(s, ch, alpha, beta, assignment, flags);
            if (eval.feasible) {
                pool[site] += alpha[user];
                placed = true;
                if (repair_log && site != sites.front())
                    repair_log->push_back("user " + std::to_string(user) + " moved from site " +
                                          std::to_string(sites.front()) + " to site " +
                                          std::to_string(site));
                break;
            }
            assignment[user] = -1;
        }
        if (!placed)
            throw InfeasibleError("round_placements: no feasible site for user " + std::to_string(user));
    }
    return assignment_to_decisions(s, alpha, beta, assignment);
}

}  // namespace uad
}  // namespace uavmec
