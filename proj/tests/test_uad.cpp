#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "uavmec/baselines.hpp"
#include "uavmec/cra.hpp"
#include "uavmec/uad.hpp"
#include "uavmec/utod.hpp"

using namespace uavmec;

namespace {

uad::FeasibleSet two_halfspace_set(const std::vector<double>& a, double b1,
                                   const std::vector<double>& g, double b2) {
    uad::FeasibleSet set;
    set.dim = static_cast<int>(a.size());
    set.capacity = uad::Halfspace{g, b2, "capacity"};
    set.energy = uad::Halfspace{a, b1, "energy"};
    return set;
}

/// Two-UAV scenario with controllable budgets for the repair tests: both
/// users live at UAV 0, UAV 1 is the only neighbor.
NetworkScenario repair_scenario() {
    auto s = generate_random(2, 2, 200.0, 101);
    s.uavs[0].x = 50;  s.uavs[0].y = 50;
    s.uavs[1].x = 150; s.uavs[1].y = 50;
    for (auto& u : s.users) {
        u.home_uav = 0;
        u.x = 45;
        u.y = 55;
        u.task.input_size_bits = 1e6;
        u.task.cycles_per_bit = 10.0;
        u.local_cpu = 1e5;  // slow locally, offloading is attractive
        u.energy_budget = 1e12;
    }
    s.users[1].x = 55;
    for (auto& v : s.uavs) {
        v.cpu_capacity = 1e6;
        v.energy_budget = 1e12;
    }
    s.bs.cpu_capacity = 2e6;
    return s;
}

}  // namespace

TEST_CASE("projection onto the feasible set") {
    SUBCASE("interior points are fixed points") {
        const auto set = two_halfspace_set({1.0, 1.0}, 10.0, {2.0, 1.0}, 10.0);
        const std::vector<double> x{0.3, 0.4};
        CHECK(uad::project_feasible(x, set) == x);
    }
    SUBCASE("box violations are clipped when the halfspaces stay slack") {
        const auto set = two_halfspace_set({1.0, 1.0}, 10.0, {2.0, 1.0}, 10.0);
        const auto p = uad::project_feasible({1.7, -0.3}, set);
        CHECK(p[0] == doctest::Approx(1.0));
        CHECK(p[1] == doctest::Approx(0.0));
    }
    SUBCASE("matches the exact active-set oracle on two-user sets") {
        std::mt19937_64 rng(103);
        for (int trial = 0; trial < 200; ++trial) {
            const std::vector<double> a{uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 2.0)};
            const std::vector<double> g{uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 2.0)};
            const double b1 = uniform(rng, 0.2, 1.5);
            const double b2 = uniform(rng, 0.2, 1.5);
            const std::vector<double> z{uniform(rng, -0.5, 2.0), uniform(rng, -0.5, 2.0)};
            const auto mine = uad::project_feasible(z, two_halfspace_set(a, b1, g, b2));
            const auto oracle = oracles::project_box_two_halfspaces_2d(z, a, b1, g, b2);
            CHECK(mine[0] == doctest::Approx(oracle[0]).epsilon(1e-6));
            CHECK(mine[1] == doctest::Approx(oracle[1]).epsilon(1e-6));
        }
    }
    SUBCASE("weighted projection via the scaled-coordinate oracle") {
        std::mt19937_64 rng(107);
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> a{uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 2.0)};
            const double b1 = uniform(rng, 0.2, 1.5);
            const std::vector<double> g{0.0, 0.0};  // single active halfspace
            const std::vector<double> w{uniform(rng, 0.5, 5.0), uniform(rng, 0.5, 5.0)};
            const std::vector<double> z{uniform(rng, -0.5, 2.0), uniform(rng, -0.5, 2.0)};
            auto set = two_halfspace_set(a, b1, g, 1.0);
            set.capacity.reset();
            const auto mine = uad::project_feasible(z, set, w);
            // y  = sqrt(w) x turns the weighted projection into a Euclidean one
            const std::vector<double> sq{std::sqrt(w[0]), std::sqrt(w[1])};
            const auto oracle = oracles::project_box_two_halfspaces_2d(
                {z[0] * sq[0], z[1] * sq[1]}, {a[0] / sq[0], a[1] / sq[1]}, b1, {0.0, 0.0}, 1.0,
                {sq[0], sq[1]});
            CHECK(mine[0] == doctest::Approx(oracle[0] / sq[0]).epsilon(1e-6));
            CHECK(mine[1] == doctest::Approx(oracle[1] / sq[1]).epsilon(1e-6));
        }
    }
    SUBCASE("an empty set names the violated budget") {
        auto set = two_halfspace_set({1.0, 1.0}, -0.5, {1.0, 1.0}, 10.0);
        set.energy->name = "uav 3 energy budget";
        try {
            uad::project_feasible({0.5, 0.5}, set);
            FAIL("expected infeasibility");
        } catch (const InfeasibleError& e) {
            CHECK(std::string(e.what()).find("uav 3 energy budget") != std::string::npos);
        }
    }
}

TEST_CASE("block update is the exact constrained argmin") {
    const auto s = generate_random(2, 4, 400.0, 109);
    const auto ch = ChannelState::compute(s);
    const auto d = DecisionSet::initial(s);
    const auto program = uad::build_program(s, ch, d.offload_bits, d.bandwidth_frac, d);
    REQUIRE(!program.problems.empty());
    const auto& p = program.problems[0];
    const int n = static_cast<int>(p.users.size());

    std::mt19937_64 rng(113);
    const double rho = 10.0;
    std::vector<double> rest(n), dual(n);
    for (int i = 0; i < n; ++i) {
        rest[i] = uniform(rng, 0.0, 1.0);
        dual[i] = uniform(rng, -1.0, 1.0);
    }
    const int site = p.home_uav;
    const auto x = uad::block_update(p, site, rest, dual, rho);

    auto block_objective = [&](const std::vector<double>& y) {
        double val = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = p.lin[p.at(i, site)];
            const double q = p.quad[p.at(i, site)];
            const double r = y[i] + rest[i] - 1.0;
            val += c * y[i] + q * y[i] * y[i] + dual[i] * r + 0.5 * rho * r * r;
        }
        return val;
    };
    const double fx = block_objective(x);
    // sampled optimality: no feasible perturbation does better
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i)
            y[i] = std::clamp(x[i] + uniform(rng, -0.2, 0.2), 0.0, 1.0);
        bool feasible = true;
        for (const auto& h : {p.omega[site].capacity, p.omega[site].energy}) {
            if (!h) continue;
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += h->coeff[i] * y[i];
            feasible = feasible && dot <= h->rhs + 1e-12;
        }
        if (feasible) CHECK(fx <= block_objective(y) + 1e-9 * std::max(1.0, std::abs(fx)));
    }
}

TEST_CASE("dual update follows the consensus residual exactly") {
    uad::UavProblem p;
    p.home_uav = 0;
    p.users = {0, 1};
    p.num_sites = 2;
    uad::AdmmState state;
    state.blocks = {{0.6, 0.3}, {0.4, 0.7}};  // sums: 1.0 and 1.0
    state.dual = {0.5, -0.2};
    auto before = state.dual;
    uad::dual_update(p, state, 10.0);
    CHECK(state.dual[0] == doctest::Approx(before[0]).epsilon(1e-15));
    CHECK(state.dual[1] == doctest::Approx(before[1]).epsilon(1e-15));

    state.blocks = {{0.6, 0.3}, {0.4 + 1e-3, 0.7 + 1e-3}};
    before = state.dual;
    uad::dual_update(p, state, 10.0);
    CHECK(state.dual[0] - before[0] == doctest::Approx(10.0 * 1e-3).epsilon(1e-9));
    CHECK(state.dual[1] - before[1] == doctest::Approx(10.0 * 1e-3).epsilon(1e-9));
}

TEST_CASE("symmetric neighbors receive identical updates under symmetric costs") {
    auto s = generate_random(3, 4, 400.0, 127);
    // home UAV 0 at the center, neighbors 1 and 2 mirrored
    s.uavs[0].x = 200; s.uavs[0].y = 200;
    s.uavs[1].x = 100; s.uavs[1].y = 200;
    s.uavs[2].x = 300; s.uavs[2].y = 200;
    s.uavs[1].cpu_capacity = s.uavs[2].cpu_capacity = 2e6;
    s.uavs[1].energy_budget = s.uavs[2].energy_budget = 500e3;
    for (auto& u : s.users) u.home_uav = 0;
    const auto ch = ChannelState::compute(s);
    const auto d = DecisionSet::initial(s);
    const auto program = uad::build_program(s, ch, d.offload_bits, d.bandwidth_frac, d);
    const auto& p = program.problems[0];
    const int n = static_cast<int>(p.users.size());
    const std::vector<double> rest(n, 0.4), dual(n, -0.1);
    const auto g1 = uad::block_update(p, 1, rest, dual, 10.0);
    const auto g2 = uad::block_update(p, 2, rest, dual, 10.0);
    for (int i = 0; i < n; ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-12));
}

TEST_CASE("a dominant home UAV wins the single-user placement") {
    auto s = generate_random(1, 1, 100.0, 131);
    s.uavs[0].cpu_capacity = 1e8;
    s.users[0].local_cpu = 0.5e6;
    const auto ch = ChannelState::compute(s);
    auto d = DecisionSet::initial(s);
    d.offload_bits[0] = s.users[0].task.input_size_bits;
    d.bandwidth_frac[0] = 1.0;
    const auto sol = uad::solve(s, ch, d.offload_bits, d.bandwidth_frac, d);
    CHECK(sol.converged);
    CHECK(sol.rounded.home_weight[0] == 1.0);
    CHECK(sol.rounded.is_one_hot());
}

TEST_CASE("placement solve on the published default scenario") {
    const auto s = generate_random(10, 50, 400.0, 1);
    const auto ch = ChannelState::compute(s);
    auto d = DecisionSet::initial(s);
    const auto split = utod::solve(s, ch, d);
    REQUIRE(split.feasible());
    d.offload_bits = split.offload_bits;
    d.bandwidth_frac = cra::solve(s, ch, d.offload_bits).bandwidth_frac;

    const auto sol = uad::solve(s, ch, d.offload_bits, d.bandwidth_frac, d);
    CHECK(sol.converged);
    CHECK(sol.iterations <= 50);
    CHECK(sol.lagrangian_monotone);
    CHECK(sol.rounded.is_one_hot());
    // consensus residual shrinks from start to finish
    REQUIRE(sol.trace.size() >= 2);
    CHECK(sol.trace.back().consensus < sol.trace.front().consensus);
    // the relaxation is never worse than its rounding
    CHECK(sol.relaxed_objective <= sol.rounded_objective * (1.0 + 1e-9));
}

TEST_CASE("ADMM matches the centralized joint solve of the same frozen program") {
    for (std::uint64_t seed : {137, 139, 149}) {
        const auto s = generate_random(3, 6, 400.0, seed);
        const auto ch = ChannelState::compute(s);
        auto d = DecisionSet::initial(s);
        const auto split = utod::solve(s, ch, d);
        REQUIRE(split.feasible());
        d.offload_bits = split.offload_bits;
        d.bandwidth_frac = cra::solve(s, ch, d.offload_bits).bandwidth_frac;

        const auto program = uad::build_program(s, ch, d.offload_bits, d.bandwidth_frac, d);
        uad::AdmmOptions one_pass;
        one_pass.refreeze_passes = 1;
        const auto admm = uad::solve(s, ch, d.offload_bits, d.bandwidth_frac, d, one_pass);
        const auto joint = baselines::centralized(s, ch, d.offload_bits, d.bandwidth_frac, d, 1);
        const double z_admm = program.objective(s, admm.relaxed);
        const double z_joint = joint.surrogate_objective;
        CHECK(std::abs(z_admm - z_joint) <= 0.005 * std::max(std::abs(z_joint), 1e-12));
    }
}

TEST_CASE("iterations never grow with the penalty parameter") {
    const auto s = generate_random(10, 50, 400.0, 5);
    const auto ch = ChannelState::compute(s);
    auto d = DecisionSet::initial(s);
    const auto split = utod::solve(s, ch, d);
    REQUIRE(split.feasible());
    d.offload_bits = split.offload_bits;
    d.bandwidth_frac = cra::solve(s, ch, d.offload_bits).bandwidth_frac;
    int last = std::numeric_limits<int>::max();
    for (double rho : {1.0, 5.0, 10.0, 15.0}) {
        uad::AdmmOptions opt;
        opt.rho = rho;
        const auto sol = uad::solve(s, ch, d.offload_bits, d.bandwidth_frac, d, opt);
        CHECK(sol.converged);
        CHECK(sol.iterations <= last);
        last = sol.iterations;
    }
}

TEST_CASE("rounding") {
    SUBCASE("argmax wins when nothing binds") {
        const auto s = repair_scenario();
        const auto ch = ChannelState::compute(s);
        auto relaxed = DecisionSet::initial(s);
        relaxed.home_weight[0] = 0.9;
        relaxed.neighbor(0, 1) = 0.05;
        relaxed.bs_weight[0] = 0.05;
        relaxed.home_weight[1] = 0.2;
        relaxed.neighbor(1, 1) = 0.75;
        relaxed.bs_weight[1] = 0.05;
        const auto rounded = uad::round_placements(s, ch, relaxed);
        CHECK(rounded.home_weight[0] == 1.0);
        CHECK(rounded.neighbor(1, 1) == 1.0);
        CHECK(rounded.is_one_hot());
    }
    SUBCASE("binary feasible input is returned unchanged") {
        const auto s = repair_scenario();
        const auto ch = ChannelState::compute(s);
        auto binary = DecisionSet::initial(s);
        binary.home_weight[0] = 0.0;
        binary.neighbor(0, 1) = 1.0;
        const auto rounded = uad::round_placements(s, ch, binary);
        CHECK(rounded.neighbor(0, 1) == 1.0);
        CHECK(rounded.home_weight[1] == 1.0);
    }
    SUBCASE("a saturated neighbor keeps exactly one of two claimants") {
        auto s = repair_scenario();
        // budget admits one forwarded task (about 3332 J each alone, about
        // 6662 J hover when both share the neighbor pool)
        s.uavs[1].energy_budget = 5000.0;
        const auto ch = ChannelState::compute(s);
        auto relaxed = DecisionSet::initial(s);
        for (int i : {0, 1}) {
            relaxed.offload_bits[i] = s.users[i].task.input_size_bits;
            relaxed.bandwidth_frac[i] = 0.5;
            relaxed.home_weight[i] = 0.08;
            relaxed.neighbor(i, 1) = 0.90;
            relaxed.bs_weight[i] = 0.02;
        }
        std::vector<std::string> log;
        const auto rounded = uad::round_placements(s, ch, relaxed, &log);
        CHECK(rounded.is_one_hot());
        const int at_neighbor = static_cast<int>(rounded.neighbor(0, 1) + rounded.neighbor(1, 1));
        CHECK(at_neighbor == 1);
        CHECK(log.size() == 1);  // exactly one user was repaired
        // the repaired placement satisfies the enforceable budget
        const auto report = check_energy_budgets(s, ch, rounded);
        for (const auto& c : report.neighbor_pairs)
            if (!c.structural) CHECK(c.satisfied);
    }
}
