#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "uavmec/utod.hpp"

using namespace uavmec;

namespace {

/// One UAV, one user, with an effectively unlimited UAV CPU.
NetworkScenario offload_friendly() {
    auto s = generate_random(1, 1, 100.0, 3);
    s.uavs[0].cpu_capacity = 1e8;
    s.users[0].local_cpu = 0.5e6;
    return s;
}

}  // namespace

TEST_CASE("slope with no offloading path is the local term") {
    const auto s = generate_random(2, 4, 400.0, 19);
    const auto ch = ChannelState::compute(s);
    auto d = DecisionSet::initial(s);
    // hypothetical: no placement at all
    for (auto& w : d.home_weight) w = 0.0;
    const auto model = FrozenCostModel::build(s, ch, d.offload_bits, d.bandwidth_frac, d);
    for (const auto& u : s.users) {
        const double slope = utod::per_user_cost_slope(s, model, d, u.id);
        CHECK(slope == doctest::Approx(-u.task.cycles_per_bit / u.local_cpu).epsilon(1e-15));
        CHECK(slope < 0.0);
    }
}

TEST_CASE("identical users get identical slopes") {
    auto s = generate_random(1, 2, 100.0, 23);
    // make the two users exact copies at the same position
    s.users[1] = s.users[0];
    s.users[1].id = 1;
    const auto ch = ChannelState::compute(s);
    const auto d = DecisionSet::initial(s);
    const auto model = FrozenCostModel::build(s, ch, d.offload_bits, d.bandwidth_frac, d);
    CHECK(utod::per_user_cost_slope(s, model, d, 0) ==
          doctest::Approx(utod::per_user_cost_slope(s, model, d, 1)).epsilon(1e-14));
}

TEST_CASE("slope matches a central finite difference of the frozen objective") {
    const auto s = generate_random(3, 8, 400.0, 29);
    const auto ch = ChannelState::compute(s);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = test_util::make_relaxed(s, rng);
        const auto model = FrozenCostModel::build(s, ch, d.offload_bits, d.bandwidth_frac, d);
        for (const auto& u : s.users) {
            const double slope = utod::per_user_cost_slope(s, model, d, u.id);
            const double h = std::max(1.0, d.offload_bits[u.id]) * 1e-4;
            const double fd = oracles::central_diff(
                [&](double alpha) {
                    auto probe = d;
                    probe.offload_bits[u.id] = alpha;
                    return objective_frozen(s, model, probe);
                },
                d.offload_bits[u.id], h);
            CHECK(slope == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("negative slope with a loose budget offloads everything") {
    const auto s = offload_friendly();
    const auto ch = ChannelState::compute(s);
    const auto d = DecisionSet::initial(s);
    const auto sol = utod::solve(s, ch, d);
    REQUIRE(sol.feasible());
    CHECK(sol.offload_bits[0] == doctest::Approx(s.users[0].task.input_size_bits));
    CHECK(sol.active[0].box_upper);
}

TEST_CASE("positive slope with a slack budget keeps everything local") {
    auto s = offload_friendly();
    s.uavs[0].cpu_capacity = 1e3;  // shared CPU far slower than local
    s.users[0].local_cpu = 3e6;
    const auto ch = ChannelState::compute(s);
    const auto d = DecisionSet::initial(s);
    const auto sol = utod::solve(s, ch, d);
    REQUIRE(sol.feasible());
    CHECK(sol.offload_bits[0] == 0.0);
    CHECK(sol.active[0].box_lower);
}

TEST_CASE("the energy cap binds when the budget is tight") {
    auto s = offload_friendly();
    const auto ch = ChannelState::compute(s);
    const auto d = DecisionSet::initial(s);
    const auto& u = s.users[0];
    const double rate = uplink_rate(d.bandwidth_frac[0], s.radio.a2g_bandwidth_per_uav,
                                    ch.gamma(0, u.home_uav));
    const double local_coeff = u.chip_constant * u.local_cpu * u.local_cpu * u.task.cycles_per_bit;
    const double target_alpha = 0.3 * u.task.input_size_bits;
    s.users[0].energy_budget = local_coeff * (u.task.input_size_bits - target_alpha) +
                               u.tx_power * target_alpha / rate;
    const auto sol = utod::solve(s, ChannelState::compute(s), d);
    REQUIRE(sol.feasible());
    CHECK(sol.offload_bits[0] == doctest::Approx(target_alpha).epsilon(1e-9));
    CHECK(sol.active[0].energy);

    // an unmeetable budget is reported, not silently fixed
    s.users[0].energy_budget = 1e-12;
    const auto bad = utod::solve(s, ChannelState::compute(s), d);
    CHECK(!bad.feasible());
    CHECK(bad.infeasible_users == std::vector<int>{0});
}

TEST_CASE("solution sits at a vertex unless the slope is zero") {
    const auto s = generate_random(3, 10, 400.0, 37);
    const auto ch = ChannelState::compute(s);
    std::mt19937_64 rng(41);
    const auto d = test_util::make_relaxed(s, rng);
    const auto sol = utod::solve(s, ch, d);
    REQUIRE(sol.feasible());
    const auto model = FrozenCostModel::build(s, ch, d.offload_bits, d.bandwidth_frac, d);
    for (const auto& u : s.users) {
        const double slope = utod::per_user_cost_slope(s, model, d, u.id);
        if (slope < 0.0) {
            CHECK((sol.active[u.id].box_upper || sol.active[u.id].energy));
        } else if (slope > 0.0) {
            CHECK((sol.active[u.id].box_lower || sol.active[u.id].energy));
        }
    }
}

TEST_CASE("frozen objective never increases across the block") {
    const auto s = generate_random(3, 10, 400.0, 43);
    const auto ch = ChannelState::compute(s);
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = test_util::make_relaxed(s, rng);
        const auto model = FrozenCostModel::build(s, ch, d.offload_bits, d.bandwidth_frac, d);
        const double before = objective_frozen(s, model, d);
        const auto sol = utod::solve(s, ch, d);
        REQUIRE(sol.feasible());
        CHECK(sol.objective <= before * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("objective matches a per-user grid search within one grid step") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 3; ++trial) {
        const auto s = generate_random(2, 5, 400.0, 59 + trial);
        const auto ch = ChannelState::compute(s);
        const auto d = test_util::make_relaxed(s, rng);
        const auto model = FrozenCostModel::build(s, ch, d.offload_bits, d.bandwidth_frac, d);
        const auto sol = utod::solve(s, ch, d);
        REQUIRE(sol.feasible());

        // independent oracle: per-user grid over the energy-feasible part of
        // [0, S], evaluated through the frozen objective
        const int points = 1001;
        auto grid = d;
        double slope_step_budget = 0.0;
        for (const auto& u : s.users) {
            const double S = u.task.input_size_bits;
            const double rate = uplink_rate(d.bandwidth_frac[u.id], s.radio.a2g_bandwidth_per_uav,
                                            ch.gamma(u.id, u.home_uav));
            const double local_coeff =
                u.chip_constant * u.local_cpu * u.local_cpu * u.task.cycles_per_bit;
            double best = std::numeric_limits<double>::infinity();
            double best_alpha = 0.0;
            for (int i = 0; i < points; ++i) {
                const double alpha = S * i / (points - 1);
                const double energy = local_coeff * (S - alpha) + u.tx_power * alpha / rate;
                if (energy > u.energy_budget + 1e-9) continue;
                auto probe = grid;
                probe.offload_bits[u.id] = alpha;
                const double z = objective_frozen(s, model, probe);
                if (z < best) {
                    best = z;
                    best_alpha = alpha;
                }
            }
            grid.offload_bits[u.id] = best_alpha;
            const double slope = utod::per_user_cost_slope(s, model, d, u.id);
            slope_step_budget += std::abs(slope) * S / (points - 1);
        }
        const double z_solver = sol.objective;
        const double z_grid = objective_frozen(s, model, grid);
        CHECK(z_solver <= z_grid + 1e-9 * std::abs(z_grid));
        CHECK(z_grid - z_solver <= slope_step_budget + 1e-9 * std::abs(z_grid));
    }
}
