#include "uavmec/cra.hpp"

#include <algorithm>
#include <cmath>

namespace uavmec {
namespace cra {

double beta_closed_form(double alpha, double zeta, double xi, double bandwidth,
                        double spectral_eff, double tx_power) {
    if (alpha <= 0.0) return 0.0;
    if (!(xi > 0.0))
        throw InfeasibleError("beta_closed_form: xi must be positive when alpha > 0");
    const double beta = std::sqrt(alpha * (1.0 + zeta * tx_power) / (xi * bandwidth * spectral_eff));
    return std::clamp(beta, 0.0, 1.0);
}

void subgradient_step(DualState& state, const std::vector<double>& beta,
                      const NetworkScenario& s, const ChannelState& ch,
                      const std::vector<double>& alpha) {
    const double inv_sqrt_i = 1.0 / std::sqrt(static_cast<double>(std::max(1, state.iteration)));
    const double step_energy = state.step_constant * inv_sqrt_i;

    for (const auto& u : s.users) {
        const int i = u.id;
        double e_up = 0.0;
        if (alpha[i] > 0.0 && beta[i] > 0.0) {
            const double rate = uplink_rate(beta[i], s.radio.a2g_bandwidth_per_uav, ch.gamma(i, u.home_uav));
            e_up = u.tx_power * alpha[i] / rate;
        }
        state.energy_mult[i] = std::max(0.0, state.energy_mult[i] + step_energy * (e_up - u.energy_budget));
    }
    for (const auto& v : s.uavs) {
        double sum = 0.0;
        for (int i : s.users_of(v.id)) sum += beta[i];
        const double step = state.step_constant * state.bandwidth_step_scale[v.id] * inv_sqrt_i;
        state.bandwidth_mult[v.id] = std::max(0.0, state.bandwidth_mult[v.id] + step * (sum - 1.0));
    }
}

Solution solve(const NetworkScenario& s, const ChannelState& ch,
               const std::vector<double>& alpha, const Options& opt) {
    const int num_users = static_cast<int>(s.users.size());
    Solution out;
    out.bandwidth_frac.assign(num_users, 0.0);
    out.duals.energy_mult.assign(num_users, 0.0);
    out.duals.bandwidth_mult.assign(s.uavs.size(), 1.0);
    out.duals.bandwidth_step_scale.assign(s.uavs.size(), 1.0);
    out.duals.step_constant = opt.step_constant;

    // Uniform start over the UAV's users; alpha = 0 users stay at zero.
    std::vector<int> users_per_uav(s.uavs.size(), 0);
    for (const auto& u : s.users) ++users_per_uav[u.home_uav];
    for (const auto& u : s.users)
        if (alpha[u.id] > 0.0) out.bandwidth_frac[u.id] = 1.0 / users_per_uav[u.home_uav];

    // Warm-start xi at the KKT scale where the unclipped shares sum to one;
    // the diminishing step is scaled the same way so the ascent can actually
    // traverse to xi* at any problem magnitude.
    for (const auto& v : s.uavs) {
        double root_sum = 0.0;
        for (int i : s.users_of(v.id)) {
            if (alpha[i] <= 0.0) continue;
            root_sum += std::sqrt(alpha[i] / (s.radio.a2g_bandwidth_per_uav * ch.gamma(i, v.id)));
        }
        const double xi0 = root_sum > 0.0 ? root_sum * root_sum : 1.0;
        out.duals.bandwidth_mult[v.id] = std::max(xi0, 1e-12);
        out.duals.bandwidth_step_scale[v.id] = std::max(1.0, xi0);
    }

    std::vector<double> beta = out.bandwidth_frac;
    std::vector<double> rates(num_users, 0.0);
    auto record = [&](int iter) {
        TracePoint p;
        p.iteration = iter;
        p.beta = beta;
        for (const auto& u : s.users)
            rates[u.id] = uplink_rate(beta[u.id], s.radio.a2g_bandwidth_per_uav, ch.gamma(u.id, u.home_uav));
        p.rate = rates;
        out.trace.push_back(p);
    };
    record(0);

    for (int i = 1; i <= opt.max_iter; ++i) {
        out.duals.iteration = i;
        subgradient_step(out.duals, beta, s, ch, alpha);

        double max_change = 0.0;
        for (const auto& u : s.users) {
            if (alpha[u.id] <= 0.0) continue;
            const double xi = out.duals.bandwidth_mult[u.home_uav];
            double next;
            if (xi > 0.0) {
                next = beta_closed_form(alpha[u.id], out.duals.energy_mult[u.id], xi,
                                        s.radio.a2g_bandwidth_per_uav, ch.gamma(u.id, u.home_uav),
                                        u.tx_power);
            } else {
                next = 1.0;  // unbounded signal: the sum constraint is slack, take the box cap
            }
            max_change = std::max(max_change, std::abs(next - beta[u.id]));
            beta[u.id] = next;
        }
        record(i);
        out.iterations = i;
        if (max_change <= opt.tolerance) {
            out.converged = true;
            break;
        }
    }

    // Final feasibility projection per UAV.
    for (const auto& v : s.uavs) {
        double sum = 0.0;
        for (int i : s.users_of(v.id)) sum += beta[i];
        if (sum > 1.0)
            for (int i : s.users_of(v.id)) beta[i] /= sum;
    }
    out.bandwidth_frac = beta;
    return out;
}

}  // namespace cra
}  // namespace uavmec
