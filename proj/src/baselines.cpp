#include "uavmec/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace uavmec {
namespace baselines {

namespace {

BaselineResult finish(const std::string& scheme, const NetworkScenario& s, const ChannelState& ch,
                      const DecisionSet& d, std::chrono::steady_clock::time_point t0) {
    BaselineResult r;
    r.scheme = scheme;
    r.decisions = d;
    r.objective = objective_value(s, ch, d);
    r.mean_latency_ms = r.objective / static_cast<double>(s.users.size()) * 1e3;
    for (const auto& u : s.users) {
        r.bs_offloaded_bits += d.bs_weight[u.id] * d.offload_bits[u.id];
        r.total_offloaded_bits += d.offload_bits[u.id];
    }
    r.energy = check_energy_budgets(s, ch, d);
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

namespace {

/// One projected-gradient solve of the frozen program at the given reference.
std::pair<DecisionSet, double> centralized_frozen(const NetworkScenario& s, const ChannelState& ch,
                                                  const std::vector<double>& alpha,
                                                  const std::vector<double>& beta,
                                                  const DecisionSet& reference) {
    const auto program = uad::build_program(s, ch, alpha, beta, reference);
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int bs = num_uavs;

    // Free variables: every UAV-site weight of every user, stacked problem by
    // problem; phi is eliminated per user.
    struct Slot {
        int problem;
        int local;
        int site;
    };
    std::vector<Slot> slots;
    std::vector<int> user_first_slot(s.users.size(), -1);
    std::vector<int> user_slot_count(s.users.size(), 0);
    for (std::size_t k = 0; k < program.problems.size(); ++k) {
        const auto& p = program.problems[k];
        for (std::size_t local = 0; local < p.users.size(); ++local) {
            user_first_slot[p.users[local]] = static_cast<int>(slots.size());
            for (int site = 0; site < num_uavs; ++site) {
                slots.push_back({static_cast<int>(k), static_cast<int>(local), site});
                ++user_slot_count[p.users[local]];
            }
        }
    }
    const int n = static_cast<int>(slots.size());

    // start from the reference placement
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& p = program.problems[slots[i].problem];
        const int u = p.users[slots[i].local];
        x[i] = slots[i].site == p.home_uav ? reference.home_weight[u]
                                           : reference.neighbor(u, slots[i].site);
    }

    auto user_sum = [&](const std::vector<double>& y, int u) {
        double sum = 0.0;
        for (int j = 0; j < user_slot_count[u]; ++j) sum += y[user_first_slot[u] + j];
        return sum;
    };

    // gradient of the frozen objective with phi = 1 - sum eliminated
    double lips = 0.0;
    for (const auto& p : program.problems)
        for (std::size_t local = 0; local < p.users.size(); ++local) {
            double dmax = 0.0;
            for (int site = 0; site < p.num_sites; ++site)
                dmax = std::max(dmax, p.quad[p.at(static_cast<int>(local), site)]);
            const double dphi = p.quad[p.at(static_cast<int>(local), bs)];
            lips = std::max(lips, 2.0 * dmax + 2.0 * dphi * num_uavs);
        }
    const double step = 1.0 / std::max(lips, 1e-12);

    auto gradient = [&](const std::vector<double>& y) {
        std::vector<double> g(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const auto& p = program.problems[slots[i].problem];
            const int u = p.users[slots[i].local];
            const int k = p.at(slots[i].local, slots[i].site);
            const int kphi = p.at(slots[i].local, bs);
            const double phi = 1.0 - user_sum(y, u);
            g[i] = p.lin[k] + 2.0 * p.quad[k] * y[i] - p.lin[kphi] - 2.0 * p.quad[kphi] * phi;
        }
        return g;
    };

    // Dykstra projection onto: each site block's feasible set and the
    // per-user sum <= 1 halfspace (phi >= 0).
    struct SetRef {
        const uad::FeasibleSet* omega;  // null for a per-user sum constraint
        std::vector<int> index;         // slot indices of the set's coordinates
    };
    std::vector<SetRef> sets;
    for (std::size_t k = 0; k < program.problems.size(); ++k) {
        const auto& p = program.problems[k];
        for (int site = 0; site < num_uavs; ++site) {
            SetRef sr;
            sr.omega = &p.omega[site];
            for (int i = 0; i < n; ++i)
                if (slots[i].problem == static_cast<int>(k) && slots[i].site == site)
                    sr.index.push_back(i);
            std::sort(sr.index.begin(), sr.index.end(),
                      [&](int a, int b) { return slots[a].local < slots[b].local; });
            sets.push_back(std::move(sr));
        }
    }
    for (const auto& u : s.users) {
        if (user_slot_count[u.id] == 0) continue;
        SetRef sr;
        sr.omega = nullptr;
        for (int j = 0; j < user_slot_count[u.id]; ++j) sr.index.push_back(user_first_slot[u.id] + j);
        sets.push_back(std::move(sr));
    }

    auto project = [&](std::vector<double> y) {
        std::vector<std::vector<double>> corrections(sets.size());
        for (std::size_t c = 0; c < sets.size(); ++c) corrections[c].assign(sets[c].index.size(), 0.0);
        for (int sweep = 0; sweep < 5000; ++sweep) {
            double change = 0.0;
            for (std::size_t c = 0; c < sets.size(); ++c) {
                auto& sr = sets[c];
                std::vector<double> sub(sr.index.size());
                for (std::size_t j = 0; j < sr.index.size(); ++j)
                    sub[j] = y[sr.index[j]] + corrections[c][j];
                std::vector<double> proj;
                if (sr.omega) {
                    proj = uad::project_feasible(sub, *sr.omega);
                } else {
                    proj = sub;
                    for (double& v : proj) v = std::clamp(v, 0.0, 1.0);
                    double sum = 0.0;
                    for (double v : proj) sum += v;
                    if (sum > 1.0) {
                        // projection onto {sum <= 1} within the box; the top
                        // entry is a valid upper bracket (it clamps all to 0)
                        double mu_lo = 0.0, mu_hi = 0.0;
                        for (double v : sub) mu_hi = std::max(mu_hi, v);
                        for (int it = 0; it < 100; ++it) {
                            const double mu = 0.5 * (mu_lo + mu_hi);
                            double t = 0.0;
                            for (double v : sub) t += std::clamp(v - mu, 0.0, 1.0);
                            (t > 1.0 ? mu_lo : mu_hi) = mu;
                        }
                        for (std::size_t j = 0; j < proj.size(); ++j)
                            proj[j] = std::clamp(sub[j] - mu_hi, 0.0, 1.0);
                    }
                }
                for (std::size_t j = 0; j < sr.index.size(); ++j) {
                    corrections[c][j] = sub[j] - proj[j];
                    change = std::max(change, std::abs(proj[j] - y[sr.index[j]]));
                    y[sr.index[j]] = proj[j];
                }
            }
            if (change <= 1e-12) break;
        }
        return y;
    };

    x = project(x);
    for (int iter = 0; iter < 20000; ++iter) {
        const auto g = gradient(x);
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) next[i] = x[i] - step * g[i];
        next = project(next);
        double change = 0.0;
        for (int i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - x[i]));
        x = std::move(next);
        if (change <= 1e-10) break;
    }

    DecisionSet d = DecisionSet::zeros(s);
    d.offload_bits = alpha;
    d.bandwidth_frac = beta;
    for (const auto& u : s.users)
        if (alpha[u.id] <= 0.0) d.home_weight[u.id] = 1.0;  // zero load sits at home
    for (int i = 0; i < n; ++i) {
        const auto& p = program.problems[slots[i].problem];
        const int u = p.users[slots[i].local];
        if (slots[i].site == p.home_uav)
            d.home_weight[u] = x[i];
        else
            d.neighbor(u, slots[i].site) = x[i];
    }
    for (const auto& u : s.users) {
        if (alpha[u.id] <= 0.0) continue;
        d.bs_weight[u.id] = std::clamp(1.0 - d.placement_sum(u.id), 0.0, 1.0);
    }
    const double surrogate = program.objective(s, d);
    return {std::move(d), surrogate};
}

}  // namespace

BaselineResult centralized(const NetworkScenario& s, const ChannelState& ch,
                           const std::vector<double>& alpha, const std::vector<double>& beta,
                           const DecisionSet& reference, int refreeze_passes) {
    const auto t0 = std::chrono::steady_clock::now();
    auto [d, surrogate] = centralized_frozen(s, ch, alpha, beta, reference);
    double z = objective_value(s, ch, d);
    for (int pass = 1; pass < refreeze_passes; ++pass) {
        auto [next, next_surrogate] = centralized_frozen(s, ch, alpha, beta, d);
        const double zn = objective_value(s, ch, next);
        if (!(zn < z * (1.0 - 1e-9))) break;
        d = std::move(next);
        surrogate = next_surrogate;
        z = zn;
    }
    auto r = finish("centralized", s, ch, d, t0);
    r.surrogate_objective = surrogate;
    return r;
}

BaselineResult greedy(const NetworkScenario& s, const ChannelState& ch,
                      const std::vector<double>& alpha, const std::vector<double>& beta) {
    const auto t0 = std::chrono::steady_clock::now();
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int bs = num_uavs;
    std::vector<double> remaining(num_uavs);
    for (const auto& v : s.uavs) remaining[v.id] = v.cpu_capacity;

    uad::Assignment assignment(s.users.size(), bs);
    for (const auto& v : s.uavs) {
        // neighbors in decreasing order of available link rate
        std::vector<int> neighbors;
        for (int w = 0; w < num_uavs; ++w)
            if (w != v.id) neighbors.push_back(w);
        std::sort(neighbors.begin(), neighbors.end(), [&](int a, int b) {
            const double ra = ch.rate_a2a(v.id, a), rb = ch.rate_a2a(v.id, b);
            if (ra != rb) return ra > rb;
            return a < b;
        });
        for (int i : s.users_of(v.id)) {
            const double demand = s.users[i].task.cycles_per_bit * alpha[i];
            if (remaining[v.id] >= demand) {
                assignment[i] = v.id;
                remaining[v.id] -= demand;
                continue;
            }
            bool forwarded = false;
            for (int w : neighbors) {
                if (remaining[w] >= demand) {
                    assignment[i] = w;
                    remaining[w] -= demand;
                    forwarded = true;
                    break;
                }
            }
            if (!forwarded) assignment[i] = bs;
        }
    }
    return finish("greedy", s, ch, uad::assignment_to_decisions(s, alpha, beta, assignment), t0);
}

BaselineResult exhaustive(const NetworkScenario& s, const ChannelState& ch,
                          const std::vector<double>& alpha, const std::vector<double>& beta,
                          std::uint64_t size_guard) {
    const auto t0 = std::chrono::steady_clock::now();
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int num_sites = num_uavs + 1;
    const int num_users = static_cast<int>(s.users.size());

    double count = 1.0;
    for (int u = 0; u < num_users; ++u) count *= num_sites;
    if (count > static_cast<double>(size_guard))
        throw ValidationError("exhaustive search needs " + std::to_string(count) +
                              " assignments, above the guard of " + std::to_string(size_guard));

    const auto flags = structural_energy_flags(s, ch, alpha, beta);
    uad::Assignment assignment(num_users, 0);
    uad::Assignment best;
    double best_objective = std::numeric_limits<double>::infinity();

    // lexicographic enumeration; strict improvement keeps the smallest
    // assignment among ties
    while (true) {
        const auto eval = uad::evaluate_assignment(s, ch, alpha, beta, assignment, flags);
        if (eval.feasible && eval.objective < best_objective) {
            best_objective = eval.objective;
            best = assignment;
        }
        int pos = num_users - 1;
        while (pos >= 0 && assignment[pos] == num_sites - 1) assignment[pos--] = 0;
        if (pos < 0) break;
        ++assignment[pos];
    }
    if (best.empty())
        throw InfeasibleError("exhaustive search found no feasible one-hot placement");
    return finish("exhaustive", s, ch, uad::assignment_to_decisions(s, alpha, beta, best), t0);
}

BaselineResult non_collaboration(const NetworkScenario& s, const ChannelState& ch,
                                 const std::vector<double>& alpha,
                                 const std::vector<double>& beta) {
    const auto t0 = std::chrono::steady_clock::now();
    const int bs = static_cast<int>(s.uavs.size());
    uad::Assignment assignment(s.users.size(), bs);
    for (const auto& v : s.uavs) {
        auto users = s.users_of(v.id);
        std::stable_sort(users.begin(), users.end(), [&](int a, int b) {
            return s.users[a].task.cycles_per_bit * alpha[a] < s.users[b].task.cycles_per_bit * alpha[b];
        });
        double remaining = v.cpu_capacity;
        for (int i : users) {
            const double demand = s.users[i].task.cycles_per_bit * alpha[i];
            if (remaining >= demand) {
                assignment[i] = v.id;
                remaining -= demand;
            }
        }
    }
    return finish("non_collaboration", s, ch, uad::assignment_to_decisions(s, alpha, beta, assignment), t0);
}

std::vector<double> bandwidth_uniform(const NetworkScenario& s) {
    std::vector<int> users_per_uav(s.uavs.size(), 0);
    for (const auto& u : s.users) ++users_per_uav[u.home_uav];
    std::vector<double> beta(s.users.size(), 0.0);
    for (const auto& u : s.users) beta[u.id] = 1.0 / users_per_uav[u.home_uav];
    return beta;
}

std::vector<double> bandwidth_proportional(const NetworkScenario& s,
                                           const std::vector<double>& alpha) {
    std::vector<double> totals(s.uavs.size(), 0.0);
    for (const auto& u : s.users) totals[u.home_uav] += alpha[u.id];
    std::vector<double> beta(s.users.size(), 0.0);
    for (const auto& u : s.users)
        if (totals[u.home_uav] > 0.0) beta[u.id] = alpha[u.id] / totals[u.home_uav];
    return beta;
}

}  // namespace baselines
}  // namespace uavmec
