#include "uavmec/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace uavmec {

namespace {

constexpr double kIndicatorTol = 1e-12;
constexpr double kWhatIfBits = 1.0;  // pool floor so shares stay defined at alpha = 0

double site_capacity(const NetworkScenario& s, int site) {
    return site < static_cast<int>(s.uavs.size()) ? s.uavs[site].cpu_capacity : s.bs.cpu_capacity;
}

/// Weight routing user u to site s under the given decisions.
double placement_weight(const NetworkScenario& s, const DecisionSet& d, int user, int site) {
    if (site == bs_site(s)) return d.bs_weight[user];
    if (s.users[user].home_uav == site) return d.home_weight[user];
    return d.neighbor(user, site);
}

}  // namespace

double DecisionSet::placement_sum(int user) const {
    double sum = home_weight[user] + bs_weight[user];
    for (int w = 0; w < num_uavs; ++w) sum += neighbor(user, w);
    return sum;
}

bool DecisionSet::is_one_hot(double tol) const {
    for (std::size_t u = 0; u < home_weight.size(); ++u) {
        int ones = 0;
        bool fractional = false;
        auto tally = [&](double x) {
            if (std::abs(x - 1.0) <= tol) ++ones;
            else if (std::abs(x) > tol) fractional = true;
        };
        tally(home_weight[u]);
        tally(bs_weight[u]);
        for (int w = 0; w < num_uavs; ++w) tally(neighbor(static_cast<int>(u), w));
        if (ones != 1 || fractional) return false;
    }
    return true;
}

DecisionSet DecisionSet::zeros(const NetworkScenario& s) {
    DecisionSet d;
    d.num_uavs = static_cast<int>(s.uavs.size());
    const auto n = s.users.size();
    d.offload_bits.assign(n, 0.0);
    d.bandwidth_frac.assign(n, 0.0);
    d.home_weight.assign(n, 0.0);
    d.neighbor_weight.assign(n * s.uavs.size(), 0.0);
    d.bs_weight.assign(n, 0.0);
    return d;
}

DecisionSet DecisionSet::initial(const NetworkScenario& s) {
    DecisionSet d = zeros(s);
    std::vector<int> users_per_uav(s.uavs.size(), 0);
    for (const auto& u : s.users) ++users_per_uav[u.home_uav];
    for (const auto& u : s.users) {
        d.offload_bits[u.id] = 0.5 * u.task.input_size_bits;
        d.bandwidth_frac[u.id] = 1.0 / users_per_uav[u.home_uav];
        d.home_weight[u.id] = 1.0;
    }
    return d;
}

void DecisionSet::validate(const NetworkScenario& s) const {
    if (offload_bits.size() != s.users.size() || home_weight.size() != s.users.size() ||
        bs_weight.size() != s.users.size() || bandwidth_frac.size() != s.users.size() ||
        neighbor_weight.size() != s.users.size() * s.uavs.size())
        throw ValidationError("decision set size does not match the scenario");
    std::vector<double> beta_sum(s.uavs.size(), 0.0);
    for (const auto& u : s.users) {
        const int i = u.id;
        if (offload_bits[i] < -1e-9 || offload_bits[i] > u.task.input_size_bits * (1 + 1e-9))
            throw ValidationError("user " + std::to_string(i) + ": offload_bits outside [0, S]");
        if (bandwidth_frac[i] < -1e-9 || bandwidth_frac[i] > 1 + 1e-9)
            throw ValidationError("user " + std::to_string(i) + ": bandwidth_frac outside [0,1]");
        auto in_unit = [](double x) { return x >= -1e-9 && x <= 1 + 1e-9; };
        if (!in_unit(home_weight[i]) || !in_unit(bs_weight[i]))
            throw ValidationError("user " + std::to_string(i) + ": placement weight outside [0,1]");
        for (int w = 0; w < num_uavs; ++w)
            if (!in_unit(neighbor(i, w)))
                throw ValidationError("user " + std::to_string(i) + ": placement weight outside [0,1]");
        if (std::abs(placement_sum(i) - 1.0) > 1e-6)
            throw ValidationError("user " + std::to_string(i) + ": placement weights must sum to 1");
        if (neighbor(i, u.home_uav) > 1e-12)
            throw ValidationError("user " + std::to_string(i) + ": forwarding to the home UAV");
        beta_sum[u.home_uav] += bandwidth_frac[i];
    }
    for (const auto& v : s.uavs)
        if (beta_sum[v.id] > 1 + 1e-6)
            throw ValidationError("uav " + std::to_string(v.id) + ": bandwidth shares sum above 1");
}

// --- scalar expressions -------------------------------------------------------

TimeEnergy local_cost(const UserNode& user, double offload_bits) {
    const double rest = user.task.input_size_bits - offload_bits;
    TimeEnergy out;
    out.time = user.task.cycles_per_bit * rest / user.local_cpu;
    out.energy = user.chip_constant * user.local_cpu * user.local_cpu * user.task.cycles_per_bit * rest;
    return out;
}

TimeEnergy upload_cost(const UserNode& user, double offload_bits, double rate) {
    TimeEnergy out;
    if (offload_bits <= 0.0) return out;
    if (!(rate > 0.0))
        throw InfeasibleError("user " + std::to_string(user.id) + ": offloading with zero uplink rate");
    out.time = offload_bits / rate;
    out.energy = user.tx_power * out.time;
    return out;
}

std::vector<double> proportional_cpu_share(const std::vector<double>& loads, double f_max) {
    double total = 0.0;
    for (double l : loads) total += l;
    std::vector<double> shares(loads.size(), 0.0);
    if (total <= 0.0) return shares;  // no work, no allocation
    for (std::size_t i = 0; i < loads.size(); ++i) shares[i] = loads[i] / total * f_max;
    return shares;
}

TimeEnergy compute_cost(double offload_bits, double cycles_per_bit, double cpu_share,
                        double chip_constant) {
    TimeEnergy out;
    if (offload_bits <= 0.0) return out;
    if (!(cpu_share > 0.0)) throw InfeasibleError("computing with a zero CPU share");
    out.time = cycles_per_bit * offload_bits / cpu_share;
    out.energy = chip_constant * cpu_share * cpu_share * cycles_per_bit * offload_bits;
    return out;
}

TimeEnergy forward_cost(double forwarded_bits, double rate, double tx_power) {
    TimeEnergy out;
    if (forwarded_bits <= 0.0) return out;
    if (!(rate > 0.0)) throw InfeasibleError("forwarding on a zero-rate link");
    out.time = forwarded_bits / rate;
    out.energy = tx_power * out.time;
    return out;
}

double hover_power(const HoverParams& h) {
    return h.thrust_n * std::sqrt(h.thrust_n) /
           (h.power_efficiency *
            std::sqrt(0.5 * std::numbers::pi * h.rotor_count * h.rotor_diameter_m * h.rotor_diameter_m *
                      h.air_density));
}

// --- evaluation -----------------------------------------------------------------

CostBreakdown evaluate(const NetworkScenario& s, const ChannelState& ch, const DecisionSet& d) {
    const int num_users = static_cast<int>(s.users.size());
    const int num_uavs = static_cast<int>(s.uavs.size());
    const int num_sites = num_uavs + 1;

    CostBreakdown out;
    out.users.resize(num_users);
    out.uavs.resize(num_uavs);

    // pooled indicator-weighted loads per site
    std::vector<double> pool(num_sites, 0.0);
    for (const auto& u : s.users)
        for (int site = 0; site < num_sites; ++site)
            pool[site] += placement_weight(s, d, u.id, site) * d.offload_bits[u.id];

    // link totals for energy and hover
    std::vector<double> fwd_bits(num_uavs * num_uavs, 0.0);
    std::vector<double> bs_bits(num_uavs, 0.0);
    for (const auto& u : s.users) {
        for (int w = 0; w < num_uavs; ++w)
            fwd_bits[u.home_uav * num_uavs + w] += d.neighbor(u.id, w) * d.offload_bits[u.id];
        bs_bits[u.home_uav] += d.bs_weight[u.id] * d.offload_bits[u.id];
    }

    std::vector<double> hover_makespan(num_uavs, 0.0);

    for (const auto& u : s.users) {
        const int i = u.id;
        const int v = u.home_uav;
        const double alpha = d.offload_bits[i];
        auto& uc = out.users[i];

        const auto loc = local_cost(u, alpha);
        uc.t_loc = loc.time;
        uc.e_loc = loc.energy;

        const double rate =
            uplink_rate(d.bandwidth_frac[i], s.radio.a2g_bandwidth_per_uav, ch.gamma(i, v));
        const auto up = upload_cost(u, alpha, rate);
        uc.t_up = up.time;
        uc.e_up = up.energy;

        const double C = u.task.cycles_per_bit;
        double branch_max = 0.0;

        const double theta = d.home_weight[i];
        if (theta > kIndicatorTol && alpha > 0.0) {
            const double t_comp = C * pool[v] / s.uavs[v].cpu_capacity;
            uc.t_comp_home = theta * t_comp;
            const double share = alpha * s.uavs[v].cpu_capacity / pool[v];
            out.uavs[v].e_comp +=
                theta * s.uavs[v].chip_constant * share * share * C * alpha;
            branch_max = std::max(branch_max, theta * t_comp);
        }
        for (int w = 0; w < num_uavs; ++w) {
            const double g = d.neighbor(i, w);
            if (g <= kIndicatorTol || alpha <= 0.0) continue;
            const double link = alpha / [&] {
                const double r = ch.rate_a2a(v, w);
                if (!(r > 0.0))
                    throw InfeasibleError("user " + std::to_string(i) + ": zero-rate inter-UAV link");
                return r;
            }();
            const double t_comp = C * pool[w] / s.uavs[w].cpu_capacity;
            uc.t_a2a_com += g * link;
            uc.t_comp_neighbor += g * t_comp;
            branch_max = std::max(branch_max, g * (link + t_comp));
        }
        const double phi = d.bs_weight[i];
        if (phi > kIndicatorTol && alpha > 0.0) {
            const double r = ch.bs_rate[v];
            if (!(r > 0.0))
                throw InfeasibleError("user " + std::to_string(i) + ": zero-rate backhaul link");
            const double link = alpha / r;
            const double t_comp = C * pool[bs_site(s)] / s.bs.cpu_capacity;
            uc.t_bs_com = phi * link;
            uc.t_comp_bs = phi * t_comp;
            branch_max = std::max(branch_max, phi * (link + t_comp));
        }

        uc.t_up_weighted = d.placement_sum(i) * uc.t_up;
        uc.t_off = uc.t_up_weighted + uc.t_comp_home + uc.t_a2a_com + uc.t_comp_neighbor +
                   uc.t_bs_com + uc.t_comp_bs;
        uc.total_latency = uc.t_loc + uc.t_off;
        uc.deadline_violated = uc.total_latency > u.task.deadline_s;
        if (uc.deadline_violated) out.deadline_violations.push_back(i);

        out.uavs[v].objective += uc.total_latency;
        if (alpha > 0.0)
            hover_makespan[v] = std::max(hover_makespan[v], uc.t_up + branch_max);
    }

    for (const auto& v : s.uavs) {
        auto& vc = out.uavs[v.id];
        for (int w = 0; w < num_uavs; ++w) {
            if (w == v.id) continue;
            const auto fwd = forward_cost(fwd_bits[v.id * num_uavs + w], ch.rate_a2a(v.id, w),
                                          v.tx_power_a2a);
            vc.e_fwd_a2a += fwd.energy;
        }
        const auto bsf = forward_cost(bs_bits[v.id], ch.bs_rate[v.id], v.tx_power_backhaul);
        vc.e_fwd_bs = bsf.energy;
        vc.t_hov = hover_makespan[v.id];
        vc.e_hov = hover_power(v.hover) * vc.t_hov;
        vc.e_total = vc.e_comp + vc.e_fwd_a2a + vc.e_fwd_bs + vc.e_hov;
        out.objective += vc.objective;
    }
    return out;
}

double objective_value(const NetworkScenario& s, const ChannelState& ch, const DecisionSet& d) {
    return evaluate(s, ch, d).objective;
}

std::string breakdown_to_csv(const NetworkScenario& s, const CostBreakdown& b) {
    std::ostringstream out;
    out.precision(17);
    out << "row_type,id,t_loc,t_up,t_comp_home,t_a2a_com,t_comp_neighbor,t_bs_com,t_comp_bs,"
           "t_off,total_latency,e_loc,e_up,e_comp,e_fwd_a2a,e_fwd_bs,e_hov,e_total,t_hov,objective\n";
    for (const auto& u : s.users) {
        const auto& uc = b.users[u.id];
        out << "user," << u.id << "," << uc.t_loc << "," << uc.t_up << "," << uc.t_comp_home << ","
            << uc.t_a2a_com << "," << uc.t_comp_neighbor << "," << uc.t_bs_com << "," << uc.t_comp_bs
            << "," << uc.t_off << "," << uc.total_latency << "," << uc.e_loc << "," << uc.e_up
            << ",,,,,,,\n";
    }
    for (const auto& v : s.uavs) {
        const auto& vc = b.uavs[v.id];
        out << "uav," << v.id << ",,,,,,,,,,,," << vc.e_comp << "," << vc.e_fwd_a2a << ","
            << vc.e_fwd_bs << "," << vc.e_hov << "," << vc.e_total << "," << vc.t_hov << ","
            << vc.objective << "\n";
    }
    return out.str();
}

// --- frozen linearization -----------------------------------------------------

FrozenCostModel FrozenCostModel::build(const NetworkScenario& s, const ChannelState& ch,
                                       const std::vector<double>& alpha,
                                       const std::vector<double>& beta,
                                       const DecisionSet& ref) {
    FrozenCostModel m;
    m.num_users = static_cast<int>(s.users.size());
    m.num_sites = static_cast<int>(s.uavs.size()) + 1;
    const int num_uavs = static_cast<int>(s.uavs.size());

    m.uplink_time.assign(m.num_users, 0.0);
    m.inv_uplink_rate.assign(m.num_users, 0.0);
    m.pricing_inv_uplink.assign(m.num_users, 0.0);
    std::vector<int> users_per_uav(num_uavs, 0);
    for (const auto& u : s.users) ++users_per_uav[u.home_uav];
    m.link_time.assign(m.num_users * m.num_sites, 0.0);
    m.inv_link_rate.assign(m.num_users * m.num_sites, 0.0);
    m.other_load.assign(m.num_users * m.num_sites, 0.0);
    m.frozen_share.assign(m.num_users * m.num_sites, 0.0);
    m.pricing_share.assign(m.num_users * m.num_sites, 0.0);
    m.self_quad.assign(m.num_users * m.num_sites, 0.0);
    m.chain_const.assign(m.num_users * m.num_sites, 0.0);

    // pooled reference loads per site (current alpha, reference indicators)
    std::vector<double> pool(m.num_sites, 0.0);
    for (const auto& u : s.users)
        for (int site = 0; site < m.num_sites; ++site)
            pool[site] += placement_weight(s, ref, u.id, site) * alpha[u.id];

    for (const auto& u : s.users) {
        const int i = u.id;
        const int v = u.home_uav;
        const double rate = uplink_rate(beta[i], s.radio.a2g_bandwidth_per_uav, ch.gamma(i, v));
        if (rate > 0.0) {
            m.inv_uplink_rate[i] = 1.0 / rate;
            m.uplink_time[i] = alpha[i] / rate;
            m.pricing_inv_uplink[i] = m.inv_uplink_rate[i];
        } else {
            m.inv_uplink_rate[i] = std::numeric_limits<double>::infinity();
            m.uplink_time[i] = alpha[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
            const double whatif = uplink_rate(1.0 / users_per_uav[v], s.radio.a2g_bandwidth_per_uav,
                                              ch.gamma(i, v));
            m.pricing_inv_uplink[i] =
                whatif > 0.0 ? 1.0 / whatif : std::numeric_limits<double>::infinity();
        }
        for (int site = 0; site < m.num_sites; ++site) {
            const int k = m.site(i, site);
            if (site != v && site < num_uavs) {
                m.inv_link_rate[k] = 1.0 / ch.rate_a2a(v, site);
                m.link_time[k] = alpha[i] * m.inv_link_rate[k];
            } else if (site == bs_site(s)) {
                m.inv_link_rate[k] = 1.0 / ch.bs_rate[v];
                m.link_time[k] = alpha[i] * m.inv_link_rate[k];
            }
            const double own = placement_weight(s, ref, i, site) * alpha[i];
            m.other_load[k] = std::max(0.0, pool[site] - own);
            // literal Eq. (16) share at the reference: a zero-load user holds
            // no capacity anywhere
            m.frozen_share[k] =
                alpha[i] > 0.0 ? site_capacity(s, site) * alpha[i] / (m.other_load[k] + alpha[i]) : 0.0;
            // pricing share: the share a full offload of this task would get,
            // so the split solver can price the offloading vertex even from
            // alpha = 0
            const double full = std::max(u.task.input_size_bits, kWhatIfBits);
            m.pricing_share[k] = site_capacity(s, site) * full / (m.other_load[k] + full);
            m.self_quad[k] = u.task.cycles_per_bit * alpha[i] / site_capacity(s, site);
            // a user with no offloaded bits costs nothing wherever it is placed
            m.chain_const[k] =
                alpha[i] > 0.0
                    ? m.uplink_time[i] + m.link_time[k] +
                          u.task.cycles_per_bit * m.other_load[k] / site_capacity(s, site)
                    : 0.0;
        }
    }
    return m;
}

double objective_frozen(const NetworkScenario& s, const FrozenCostModel& m, const DecisionSet& d) {
    double z = 0.0;
    for (const auto& u : s.users) {
        const int i = u.id;
        const double alpha = d.offload_bits[i];
        z += local_cost(u, alpha).time;
        const double C = u.task.cycles_per_bit;
        const double t_up = alpha * m.inv_uplink_rate[i];
        auto chain = [&](int site) {
            if (alpha <= 0.0) return 0.0;
            const int k = m.site(i, site);
            if (!(m.pricing_share[k] > 0.0))
                throw InfeasibleError("user " + std::to_string(i) + ": zero frozen CPU share");
            return t_up + alpha * m.inv_link_rate[k] + C * alpha / m.pricing_share[k];
        };
        if (d.home_weight[i] > kIndicatorTol) z += d.home_weight[i] * chain(u.home_uav);
        for (int w = 0; w < d.num_uavs; ++w)
            if (d.neighbor(i, w) > kIndicatorTol) z += d.neighbor(i, w) * chain(w);
        if (d.bs_weight[i] > kIndicatorTol) z += d.bs_weight[i] * chain(bs_site(s));
    }
    return z;
}

// --- energy ------------------------------------------------------------------

bool EnergyReport::all_satisfied() const {
    auto ok = [](const std::vector<EnergyConstraint>& v) {
        return std::all_of(v.begin(), v.end(), [](const auto& c) { return c.satisfied; });
    };
    return ok(user_energy) && ok(uav_total) && ok(neighbor_pairs);
}

bool EnergyReport::enforceable_satisfied() const {
    auto ok = [](const std::vector<EnergyConstraint>& v) {
        return std::all_of(v.begin(), v.end(),
                           [](const auto& c) { return c.satisfied || c.structural; });
    };
    return ok(user_energy) && ok(uav_total) && ok(neighbor_pairs);
}

StructuralFlags structural_energy_flags(const NetworkScenario& s, const ChannelState& ch,
                                        const std::vector<double>& alpha,
                                        const std::vector<double>& beta) {
    const int num_uavs = static_cast<int>(s.uavs.size());
    StructuralFlags flags;
    flags.uav_total.assign(num_uavs, false);
    flags.neighbor_pair.assign(num_uavs * num_uavs, false);

    // cheapest achievable hover makespan per UAV: every user takes its best
    // chain with a full-capacity (single-user) compute share
    for (const auto& v : s.uavs) {
        double makespan = 0.0;
        for (int i : s.users_of(v.id)) {
            if (alpha[i] <= 0.0) continue;
            const auto& u = s.users[i];
            const double rate = uplink_rate(beta[i], s.radio.a2g_bandwidth_per_uav, ch.gamma(i, v.id));
            const double t_up = rate > 0.0 ? alpha[i] / rate : std::numeric_limits<double>::infinity();
            const double C = u.task.cycles_per_bit;
            double best = C * alpha[i] / v.cpu_capacity;
            for (int w = 0; w < num_uavs; ++w) {
                if (w == v.id) continue;
                best = std::min(best, alpha[i] / ch.rate_a2a(v.id, w) + C * alpha[i] / s.uavs[w].cpu_capacity);
            }
            best = std::min(best, alpha[i] / ch.bs_rate[v.id] + C * alpha[i] / s.bs.cpu_capacity);
            makespan = std::max(makespan, t_up + best);
        }
        flags.uav_total[v.id] = hover_power(v.hover) * makespan > v.energy_budget;
    }

    for (const auto& v : s.uavs) {
        for (const auto& w : s.uavs) {
            if (v.id == w.id) continue;
            double cheapest = std::numeric_limits<double>::infinity();
            for (int i : s.users_of(v.id)) {
                if (alpha[i] <= 0.0) continue;
                const double C = s.users[i].task.cycles_per_bit;
                const double t_comp = C * alpha[i] / w.cpu_capacity;
                const double e = w.chip_constant * w.cpu_capacity * w.cpu_capacity * C * alpha[i] +
                                 hover_power(w.hover) * t_comp;
                cheapest = std::min(cheapest, e);
            }
            if (std::isfinite(cheapest) && cheapest > w.energy_budget)
                flags.neighbor_pair[v.id * num_uavs + w.id] = true;
        }
    }
    return flags;
}

EnergyReport check_energy_budgets(const NetworkScenario& s, const ChannelState& ch,
                                  const DecisionSet& d) {
    const int num_uavs = static_cast<int>(s.uavs.size());
    const auto breakdown = evaluate(s, ch, d);
    const auto flags = structural_energy_flags(s, ch, d.offload_bits, d.bandwidth_frac);

    EnergyReport report;
    for (const auto& u : s.users) {
        EnergyConstraint c;
        c.name = "user " + std::to_string(u.id) + " energy";
        c.lhs = breakdown.users[u.id].e_loc + breakdown.users[u.id].e_up;
        c.budget = u.energy_budget;
        c.slack = c.budget - c.lhs;
        c.satisfied = c.slack >= -1e-9;
        report.user_energy.push_back(c);
    }
    for (const auto& v : s.uavs) {
        EnergyConstraint c;
        c.name = "uav " + std::to_string(v.id) + " energy";
        c.lhs = breakdown.uavs[v.id].e_total;
        c.budget = v.energy_budget;
        c.slack = c.budget - c.lhs;
        c.satisfied = c.slack >= -1e-9;
        c.structural = flags.uav_total[v.id];
        report.uav_total.push_back(c);
    }

    // forwarded compute + forwarded-work hover per (home, neighbor) pair
    std::vector<double> pool(num_uavs + 1, 0.0);
    for (const auto& u : s.users)
        for (int site = 0; site <= num_uavs; ++site)
            pool[site] += placement_weight(s, d, u.id, site) * d.offload_bits[u.id];
    for (const auto& v : s.uavs) {
        for (const auto& w : s.uavs) {
            if (v.id == w.id) continue;
            double e_comp = 0.0;
            double hover_fwd = 0.0;
            for (int i : s.users_of(v.id)) {
                const double g = d.neighbor(i, w.id);
                const double a = d.offload_bits[i];
                if (g <= kIndicatorTol || a <= 0.0) continue;
                const double C = s.users[i].task.cycles_per_bit;
                const double share = a * w.cpu_capacity / pool[w.id];
                e_comp += g * w.chip_constant * share * share * C * a;
                hover_fwd = std::max(hover_fwd, g * C * pool[w.id] / w.cpu_capacity);
            }
            EnergyConstraint c;
            c.name = "uav " + std::to_string(w.id) + " energy for tasks forwarded from uav " +
                     std::to_string(v.id);
            c.lhs = e_comp + hover_power(w.hover) * hover_fwd;
            c.budget = w.energy_budget;
            c.slack = c.budget - c.lhs;
            c.satisfied = c.slack >= -1e-9;
            c.structural = flags.pair(v.id, w.id, num_uavs);
            report.neighbor_pairs.push_back(c);
        }
    }
    return report;
}

}  // namespace uavmec
