#include <cmath>
#include <limits>

#include "doctest.h"
#include "uavmec/baselines.hpp"
#include "uavmec/orchestrator.hpp"

using namespace uavmec;

namespace {

/// Two UAVs, controllable capacities; every user homed at UAV 0.
NetworkScenario pair_scenario(double cap0, double cap1, int users = 4) {
    auto s = generate_random(2, users, 200.0, 307);
    s.uavs[0].x = 50;  s.uavs[0].y = 100;
    s.uavs[1].x = 150; s.uavs[1].y = 100;
    s.uavs[0].cpu_capacity = cap0 > 0 ? cap0 : 1.0;
    s.uavs[1].cpu_capacity = cap1 > 0 ? cap1 : 1.0;
    for (auto& u : s.users) u.home_uav = 0;
    return s;
}

}  // namespace

TEST_CASE("greedy forwarding") {
    const int users = 4;
    std::vector<double> alpha(users, 1e8);
    SUBCASE("one neighbor with effectively infinite capacity absorbs all overflow") {
        auto s = pair_scenario(1.0, 1e30, users);
        const auto ch = ChannelState::compute(s);
        const auto beta = baselines::bandwidth_uniform(s);
        const auto r = baselines::greedy(s, ch, alpha, beta);
        for (const auto& u : s.users) {
            CHECK(r.decisions.neighbor(u.id, 1) == 1.0);
            CHECK(r.decisions.bs_weight[u.id] == 0.0);
        }
        CHECK(r.bs_offloaded_bits == 0.0);
    }
    SUBCASE("no neighbor capacity sends all overflow to the BS") {
        auto s = pair_scenario(1.0, 1.0, users);
        const auto ch = ChannelState::compute(s);
        const auto beta = baselines::bandwidth_uniform(s);
        const auto r = baselines::greedy(s, ch, alpha, beta);
        for (const auto& u : s.users) CHECK(r.decisions.bs_weight[u.id] == 1.0);
        CHECK(r.bs_offloaded_bits == doctest::Approx(users * 1e8));
    }
    SUBCASE("home serves first when its capacity covers the demand") {
        auto s = pair_scenario(1e30, 1e30, users);
        const auto ch = ChannelState::compute(s);
        const auto beta = baselines::bandwidth_uniform(s);
        const auto r = baselines::greedy(s, ch, alpha, beta);
        for (const auto& u : s.users) CHECK(r.decisions.home_weight[u.id] == 1.0);
    }
}

TEST_CASE("non-collaboration") {
    const int users = 4;
    std::vector<double> alpha(users, 1e8);
    SUBCASE("ample home capacity keeps everyone at home") {
        auto s = pair_scenario(1e30, 1e30, users);
        const auto ch = ChannelState::compute(s);
        const auto r = baselines::non_collaboration(s, ch, alpha, baselines::bandwidth_uniform(s));
        for (const auto& u : s.users) CHECK(r.decisions.home_weight[u.id] == 1.0);
    }
    SUBCASE("no home capacity sends everyone to the BS, never to a neighbor") {
        auto s = pair_scenario(1.0, 1e30, users);
        const auto ch = ChannelState::compute(s);
        const auto r = baselines::non_collaboration(s, ch, alpha, baselines::bandwidth_uniform(s));
        for (const auto& u : s.users) {
            CHECK(r.decisions.bs_weight[u.id] == 1.0);
            CHECK(r.decisions.neighbor(u.id, 1) == 0.0);
        }
    }
}

TEST_CASE("exhaustive search") {
    SUBCASE("one user two sites picks the cheaper one") {
        auto s = generate_random(1, 1, 100.0, 311);
        s.uavs[0].cpu_capacity = 1e8;
        const auto ch = ChannelState::compute(s);
        const std::vector<double> alpha{s.users[0].task.input_size_bits};
        const std::vector<double> beta{1.0};
        const auto r = baselines::exhaustive(s, ch, alpha, beta);
        // by hand: the home chain beats the mmWave backhaul chain here
        CHECK(r.decisions.home_weight[0] == 1.0);
    }
    SUBCASE("two users, two UAVs and the BS: matches hand enumeration of 9 assignments") {
        auto s = pair_scenario(2e6, 2e6, 2);
        const auto ch = ChannelState::compute(s);
        const std::vector<double> alpha{6e8, 9e8};
        const auto beta = baselines::bandwidth_uniform(s);
        const auto flags = structural_energy_flags(s, ch, alpha, beta);

        double best = std::numeric_limits<double>::infinity();
        uad::Assignment best_assign;
        for (int s0 : {0, 1, 2}) {
            for (int s1 : {0, 1, 2}) {
                const uad::Assignment assign{s0, s1};
                const auto eval = uad::evaluate_assignment(s, ch, alpha, beta, assign, flags);
                if (eval.feasible && eval.objective < best) {
                    best = eval.objective;
                    best_assign = assign;
                }
            }
        }
        const auto r = baselines::exhaustive(s, ch, alpha, beta);
        CHECK(r.objective == doctest::Approx(best).epsilon(1e-12));
        const auto d = uad::assignment_to_decisions(s, alpha, beta, best_assign);
        CHECK(objective_value(s, ch, d) == doctest::Approx(r.objective).epsilon(1e-12));
    }
    SUBCASE("the guard refuses oversized enumerations") {
        const auto s = generate_random(10, 12, 400.0, 313);
        const auto ch = ChannelState::compute(s);
        std::vector<double> alpha(12, 1e8);
        try {
            baselines::exhaustive(s, ch, alpha, baselines::bandwidth_uniform(s), 1000);
            FAIL("expected the guard to refuse");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("guard") != std::string::npos);
        }
    }
}

TEST_CASE("bandwidth allocators") {
    auto s = pair_scenario(2e6, 2e6, 4);
    SUBCASE("uniform splits evenly") {
        const auto beta = baselines::bandwidth_uniform(s);
        for (const auto& u : s.users) CHECK(beta[u.id] == doctest::Approx(0.25));
    }
    SUBCASE("proportional follows the offloaded bits") {
        std::vector<double> alpha{1e8, 1e8, 3e8, 3e8};
        const auto beta = baselines::bandwidth_proportional(s, alpha);
        CHECK(beta[0] == doctest::Approx(0.125));
        CHECK(beta[2] == doctest::Approx(0.375));
        const auto idle = baselines::bandwidth_proportional(s, {0.0, 0.0, 0.0, 0.0});
        for (double b : idle) CHECK(b == 0.0);
    }
}

TEST_CASE("scheme comparison sanity on one instance") {
    const auto s = generate_random(3, 10, 400.0, 5);
    const auto ch = ChannelState::compute(s);
    const auto report = orchestrator::solve(s);
    REQUIRE(report.feasible());
    const auto& alpha = report.relaxed.offload_bits;
    const auto& beta = report.relaxed.bandwidth_frac;

    const auto exh = baselines::exhaustive(s, ch, alpha, beta);
    const auto greedy = baselines::greedy(s, ch, alpha, beta);
    const auto nc = baselines::non_collaboration(s, ch, alpha, beta);

    // the rounded proposal competes on the binary problem and cannot beat
    // the exact optimum
    CHECK(report.rounded_objective >= exh.objective * (1.0 - 1e-9));
    CHECK(greedy.objective >= report.relaxed_objective * (1.0 - 1e-9));
    CHECK(nc.objective >= greedy.objective * (1.0 - 1e-9));
    // identical feasibility report schema for every scheme
    CHECK(greedy.energy.uav_total.size() == report.energy.uav_total.size());
    CHECK(nc.energy.neighbor_pairs.size() == report.energy.neighbor_pairs.size());
}
