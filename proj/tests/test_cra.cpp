#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "uavmec/cra.hpp"

using namespace uavmec;

namespace {

/// Independent primal route: KKT bisection on the bandwidth multiplier with
/// the energy constraint folded in as the per-user lower bound
/// beta >= P alpha / (E_max B Gamma).
std::vector<double> primal_bisection(const NetworkScenario& s, const ChannelState& ch,
                                     const std::vector<double>& alpha) {
    std::vector<double> beta(s.users.size(), 0.0);
    for (const auto& v : s.uavs) {
        std::vector<int> users;
        for (int i : s.users_of(v.id))
            if (alpha[i] > 0.0) users.push_back(i);
        if (users.empty()) continue;
        auto beta_at = [&](double nu) {
            double sum = 0.0;
            for (int i : users) {
                const double gamma = ch.gamma(i, v.id);
                const double lo = s.users[i].tx_power * alpha[i] /
                                  (s.users[i].energy_budget * s.radio.a2g_bandwidth_per_uav * gamma);
                const double b = std::sqrt(alpha[i] / (nu * s.radio.a2g_bandwidth_per_uav * gamma));
                sum += std::clamp(std::max(b, lo), 0.0, 1.0);
            }
            return sum;
        };
        double nu_lo = 1e-18, nu_hi = 1.0;
        while (beta_at(nu_hi) > 1.0) nu_hi *= 2.0;
        if (beta_at(nu_lo) <= 1.0) {
            nu_hi = nu_lo;  // the sum constraint is slack, everyone clips at 1
        } else {
            for (int it = 0; it < 400; ++it) {
                const double nu = 0.5 * (nu_lo + nu_hi);
                (beta_at(nu) > 1.0 ? nu_lo : nu_hi) = nu;
            }
        }
        for (int i : users) {
            const double gamma = ch.gamma(i, v.id);
            const double lo = s.users[i].tx_power * alpha[i] /
                              (s.users[i].energy_budget * s.radio.a2g_bandwidth_per_uav * gamma);
            const double b = std::sqrt(alpha[i] / (nu_hi * s.radio.a2g_bandwidth_per_uav * gamma));
            beta[i] = std::clamp(std::max(b, lo), 0.0, 1.0);
        }
        // mirror the solver's final normalization
        double sum = 0.0;
        for (int i : users) sum += beta[i];
        if (sum > 1.0)
            for (int i : users) beta[i] /= sum;
    }
    return beta;
}

}  // namespace

TEST_CASE("closed form share") {
    SUBCASE("no offloaded bits means no bandwidth") {
        CHECK(cra::beta_closed_form(0.0, 0.0, 5.0, 3e6, 50.0, 0.2) == 0.0);
    }
    SUBCASE("quadrupling the bits doubles the unclipped share") {
        const double b1 = cra::beta_closed_form(1e4, 0.3, 2e3, 3e6, 50.0, 0.2);
        const double b4 = cra::beta_closed_form(4e4, 0.3, 2e3, 3e6, 50.0, 0.2);
        REQUIRE(b4 < 1.0);  // stayed unclipped
        CHECK(b4 == doctest::Approx(2.0 * b1).epsilon(1e-12));
    }
    SUBCASE("zero xi with work to send is an error") {
        CHECK_THROWS_AS(cra::beta_closed_form(1e4, 0.0, 0.0, 3e6, 50.0, 0.2), InfeasibleError);
    }
    SUBCASE("matches golden-section minimization of the per-user dual term") {
        std::mt19937_64 rng(61);
        for (int trial = 0; trial < 50; ++trial) {
            const double alpha = uniform(rng, 1e3, 1e9);
            const double zeta = uniform(rng, 0.0, 2.0);
            const double gamma = uniform(rng, 10.0, 60.0);
            const double bandwidth = 3e6;
            const double tx_power = 0.2;
            // scale xi so the optimum is interior
            const double xi = alpha * (1.0 + zeta * tx_power) / (bandwidth * gamma) /
                              uniform(rng, 0.01, 0.8);
            auto lagrangian_term = [&](long double beta) {
                return static_cast<long double>(alpha) * (1.0L + static_cast<long double>(zeta) * tx_power) /
                           (beta * bandwidth * static_cast<long double>(gamma)) +
                       static_cast<long double>(xi) * beta;
            };
            const double beta_star = cra::beta_closed_form(alpha, zeta, xi, bandwidth, gamma, tx_power);
            const double oracle =
                static_cast<double>(oracles::golden_section(lagrangian_term, 1e-9L, 1.0L));
            CHECK(beta_star == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("subgradient step") {
    const auto s = generate_random(2, 6, 400.0, 67);
    const auto ch = ChannelState::compute(s);
    std::vector<double> alpha(s.users.size(), 1e8);

    cra::DualState state;
    state.energy_mult.assign(s.users.size(), 0.0);
    state.bandwidth_mult.assign(s.uavs.size(), 0.0);
    state.bandwidth_step_scale.assign(s.uavs.size(), 1.0);
    state.step_constant = 0.1;

    SUBCASE("slack constraints keep zero multipliers at zero") {
        std::vector<double> beta(s.users.size(), 0.01);  // sums far below 1
        state.iteration = 1;
        cra::subgradient_step(state, beta, s, ch, alpha);
        for (double z : state.energy_mult) CHECK(z == 0.0);
        for (double x : state.bandwidth_mult) CHECK(x == 0.0);
    }
    SUBCASE("an oversubscribed UAV pushes its multiplier up") {
        std::vector<double> beta(s.users.size(), 0.9);
        state.iteration = 1;
        cra::subgradient_step(state, beta, s, ch, alpha);
        for (const auto& v : s.uavs)
            if (!s.users_of(v.id).empty()) CHECK(state.bandwidth_mult[v.id] > 0.0);
    }
    SUBCASE("diminishing step follows m over sqrt(i)") {
        // measure the xi update at a fixed violation for i = 1, 4, 100
        std::vector<double> beta(s.users.size(), 0.0);
        for (int i : s.users_of(0)) beta[i] = 2.0 / s.users_of(0).size();  // sum = 2, violation 1
        double deltas[3];
        int idx = 0;
        for (int i : {1, 4, 100}) {
            cra::DualState st = state;
            st.iteration = i;
            cra::subgradient_step(st, beta, s, ch, alpha);
            deltas[idx++] = st.bandwidth_mult[0];
        }
        CHECK(deltas[0] == doctest::Approx(0.1 * 1.0).epsilon(1e-12));   // rho(1) = m
        CHECK(deltas[1] == doctest::Approx(0.1 / 2.0).epsilon(1e-12));   // rho(4) = m/2
        CHECK(deltas[2] == doctest::Approx(0.1 / 10.0).epsilon(1e-12));  // rho(100) = m/10
    }
}

TEST_CASE("a lone claimant takes the whole band") {
    auto s = generate_random(1, 1, 100.0, 71);
    const auto ch = ChannelState::compute(s);
    const std::vector<double> alpha{s.users[0].task.input_size_bits};
    const auto sol = cra::solve(s, ch, alpha);
    CHECK(sol.converged);
    CHECK(sol.bandwidth_frac[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("five-user allocation favors the dominant claimant and converges fast") {
    auto s = generate_random(1, 5, 400.0, 73);
    // user 2: best channel (closest) and the largest offload
    s.users[2].x = s.uavs[0].x;
    s.users[2].y = s.uavs[0].y;
    const auto ch = ChannelState::compute(s);
    std::vector<double> alpha(5);
    for (int i = 0; i < 5; ++i) alpha[i] = 0.2 * s.users[i].task.input_size_bits;
    alpha[2] = 6.0 * *std::max_element(alpha.begin(), alpha.end());

    const auto sol = cra::solve(s, ch, alpha);
    CHECK(sol.converged);
    CHECK(sol.iterations <= 50);
    int best_gain = 0;
    for (int i = 1; i < 5; ++i)
        if (ch.gain(i, 0) > ch.gain(best_gain, 0)) best_gain = i;
    CHECK(best_gain == 2);
    for (int i = 0; i < 5; ++i)
        if (i != 2) CHECK(sol.bandwidth_frac[2] > sol.bandwidth_frac[i]);
    // and the highest achievable rate
    const auto& last = sol.trace.back();
    for (int i = 0; i < 5; ++i)
        if (i != 2) CHECK(last.rate[2] > last.rate[i]);
}

TEST_CASE("dual ascent matches the independent primal route") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 4; ++trial) {
        const auto s = generate_random(2, 7, 400.0, 83 + trial);
        const auto ch = ChannelState::compute(s);
        std::vector<double> alpha(s.users.size());
        for (const auto& u : s.users)
            alpha[u.id] = uniform(rng, 0.1, 1.0) * u.task.input_size_bits;
        const auto sol = cra::solve(s, ch, alpha);
        const auto oracle = primal_bisection(s, ch, alpha);
        for (std::size_t i = 0; i < alpha.size(); ++i)
            CHECK(sol.bandwidth_frac[i] == doctest::Approx(oracle[i]).epsilon(1e-4));
    }
}

TEST_CASE("solution invariants") {
    const auto s = generate_random(3, 12, 400.0, 89);
    const auto ch = ChannelState::compute(s);
    std::vector<double> alpha(s.users.size());
    std::mt19937_64 rng(97);
    for (const auto& u : s.users) alpha[u.id] = uniform(rng, 0.1, 1.0) * u.task.input_size_bits;
    const auto sol = cra::solve(s, ch, alpha);

    SUBCASE("dual feasibility and the sum constraint") {
        for (double z : sol.duals.energy_mult) CHECK(z >= 0.0);
        for (double x : sol.duals.bandwidth_mult) CHECK(x >= 0.0);
        for (const auto& v : s.uavs) {
            double sum = 0.0;
            for (int i : s.users_of(v.id)) sum += sol.bandwidth_frac[i];
            CHECK(sum <= 1.0 + 1e-6);
            // complementary slackness at convergence
            CHECK(sol.duals.bandwidth_mult[v.id] * (sum - 1.0) <= 1e-4);
        }
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            CHECK(sol.bandwidth_frac[i] >= 0.0);
            CHECK(sol.bandwidth_frac[i] <= 1.0);
        }
    }
    SUBCASE("normalized shares are invariant to a uniform scaling of the bits") {
        std::vector<double> scaled = alpha;
        for (double& a : scaled) a *= 3.0;
        const auto sol2 = cra::solve(s, ch, scaled);
        for (const auto& v : s.uavs) {
            double sum1 = 0.0, sum2 = 0.0;
            for (int i : s.users_of(v.id)) {
                sum1 += sol.bandwidth_frac[i];
                sum2 += sol2.bandwidth_frac[i];
            }
            if (sum1 <= 0.0) continue;
            for (int i : s.users_of(v.id))
                CHECK(sol.bandwidth_frac[i] / sum1 ==
                      doctest::Approx(sol2.bandwidth_frac[i] / sum2).epsilon(1e-9));
        }
    }
    SUBCASE("the transmission objective is convex along every coordinate") {
        auto z_of = [&](const std::vector<double>& beta) {
            double z = 0.0;
            for (const auto& u : s.users)
                if (alpha[u.id] > 0.0)
                    z += alpha[u.id] /
                         uplink_rate(beta[u.id], s.radio.a2g_bandwidth_per_uav, ch.gamma(u.id, u.home_uav));
            return z;
        };
        std::vector<double> beta(s.users.size(), 0.3);
        for (const auto& u : s.users) {
            const double h = 0.01;
            auto up = beta, down = beta;
            up[u.id] += h;
            down[u.id] -= h;
            CHECK(z_of(up) - 2.0 * z_of(beta) + z_of(down) >= 0.0);
        }
    }
}
