#include "uavmec/utod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavmec {
namespace utod {

namespace {
constexpr double kSlopeTol = 1e-15;   // relative tie tolerance on the slope
constexpr double kEnergyTol = 1e-9;   // constraint residual tolerance (J)
}

double per_user_cost_slope(const NetworkScenario& s, const FrozenCostModel& m,
                           const DecisionSet& fixed, int user) {
    const auto& u = s.users[user];
    const double C = u.task.cycles_per_bit;
    double slope = -C / u.local_cpu;

    const double placed = fixed.placement_sum(user);
    auto add_site = [&](double weight, int site) {
        if (weight <= 1e-12) return;
        const int k = m.site(user, site);
        if (!(m.pricing_share[k] > 0.0))
            throw InfeasibleError("user " + std::to_string(user) + ": zero frozen CPU share on an active path");
        slope += weight * (m.inv_link_rate[k] + C / m.pricing_share[k]);
    };
    if (placed > 1e-12) slope += placed * m.pricing_inv_uplink[user];
    add_site(fixed.home_weight[user], u.home_uav);
    for (int w = 0; w < fixed.num_uavs; ++w) add_site(fixed.neighbor(user, w), w);
    add_site(fixed.bs_weight[user], bs_site(s));
    return slope;
}

Solution solve(const NetworkScenario& s, const ChannelState& ch, const DecisionSet& incoming) {
    const auto model = FrozenCostModel::build(s, ch, incoming.offload_bits,
                                              incoming.bandwidth_frac, incoming);
    Solution out;
    out.offload_bits = incoming.offload_bits;
    out.active.resize(s.users.size());

    std::vector<int> users_per_uav(s.uavs.size(), 0);
    for (const auto& u : s.users) ++users_per_uav[u.home_uav];

    for (const auto& u : s.users) {
        const int i = u.id;
        const double S = u.task.input_size_bits;
        // users currently priced out of the band (beta = 0) are priced at the
        // uniform share so offloading can re-enter; the next CRA pass assigns
        // them a real share
        double rate =
            uplink_rate(incoming.bandwidth_frac[i], s.radio.a2g_bandwidth_per_uav, ch.gamma(i, u.home_uav));
        if (!(rate > 0.0))
            rate = uplink_rate(1.0 / users_per_uav[u.home_uav], s.radio.a2g_bandwidth_per_uav,
                               ch.gamma(i, u.home_uav));

        // energy constraint kappa f^2 C (S - a) + P a / R <= E_max, linear in a
        const double local_coeff = u.chip_constant * u.local_cpu * u.local_cpu * u.task.cycles_per_bit;
        double lo = 0.0, hi = S;
        if (rate > 0.0) {
            const double a_coeff = u.tx_power / rate - local_coeff;
            const double base = local_coeff * S;  // energy at alpha = 0
            if (a_coeff > 0.0) {
                hi = std::min(hi, (u.energy_budget - base) / a_coeff);
            } else if (a_coeff < 0.0) {
                lo = std::max(lo, (u.energy_budget - base) / a_coeff);
            } else if (base > u.energy_budget + kEnergyTol) {
                out.infeasible_users.push_back(i);
                continue;
            }
        } else {
            // no uplink: only alpha = 0 avoids an infinite upload
            hi = 0.0;
            if (local_coeff * S > u.energy_budget + kEnergyTol) {
                out.infeasible_users.push_back(i);
                continue;
            }
        }
        if (lo > hi + kEnergyTol) {
            out.infeasible_users.push_back(i);
            continue;
        }
        lo = std::min(lo, hi);

        double alpha;
        const double slope = per_user_cost_slope(s, model, incoming, i);
        const double scale = std::max(1.0, std::abs(-u.task.cycles_per_bit / u.local_cpu));
        if (slope < -kSlopeTol * scale) {
            alpha = hi;
        } else if (slope > kSlopeTol * scale) {
            alpha = lo;
        } else {
            alpha = std::clamp(incoming.offload_bits[i], lo, hi);  // tie-break: keep previous
        }
        out.offload_bits[i] = alpha;
        out.active[i].box_lower = alpha <= 1e-9;
        out.active[i].box_upper = alpha >= S - 1e-9 * S;
        if (rate > 0.0) {
            const double energy = local_coeff * (S - alpha) + u.tx_power * alpha / rate;
            out.active[i].energy = std::abs(energy - u.energy_budget) <= kEnergyTol * std::max(1.0, u.energy_budget);
        }
    }

    DecisionSet result = incoming;
    result.offload_bits = out.offload_bits;
    out.objective = objective_frozen(s, model, result);
    return out;
}

}  // namespace utod
}  // namespace uavmec
