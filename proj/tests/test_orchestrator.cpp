#include <cmath>

#include "doctest.h"
#include "uavmec/orchestrator.hpp"

using namespace uavmec;

TEST_CASE("single user with a dominant UAV converges to full offload at home") {
    auto s = generate_random(1, 1, 100.0, 211);
    s.uavs[0].cpu_capacity = 1e8;
    s.users[0].local_cpu = 0.5e6;
    const auto report = orchestrator::solve(s);
    REQUIRE(report.feasible());
    CHECK(report.converged);
    CHECK(report.iterations <= 3);
    CHECK(report.relaxed.offload_bits[0] ==
          doctest::Approx(s.users[0].task.input_size_bits));
    CHECK(report.rounded.home_weight[0] == 1.0);
}

TEST_CASE("outer objective trace is non-increasing") {
    const auto s = generate_random(5, 20, 400.0, 223);
    const auto report = orchestrator::solve(s);
    REQUIRE(report.feasible());
    for (std::size_t k = 1; k < report.outer_objectives.size(); ++k)
        CHECK(report.outer_objectives[k] <=
              report.outer_objectives[k - 1] * (1.0 + 1e-9));
    CHECK(report.mean_latency_ms ==
          doctest::Approx(report.relaxed_objective / s.users.size() * 1e3));
    CHECK(report.rounded.is_one_hot());
}

TEST_CASE("identical runs give byte-identical reports") {
    const auto s = generate_random(4, 12, 400.0, 227);
    const auto a = orchestrator::report_to_json(s, orchestrator::solve(s), false);
    const auto b = orchestrator::report_to_json(s, orchestrator::solve(s), false);
    CHECK(a == b);
}

TEST_CASE("re-running the blocks at a fixed point barely moves the objective") {
    const auto s = generate_random(3, 10, 400.0, 229);
    orchestrator::Options opt;
    const auto report = orchestrator::solve(s, opt);
    REQUIRE(report.feasible());
    REQUIRE(report.converged);

    const auto channel = ChannelState::compute(s);
    DecisionSet d = report.relaxed;
    const double z0 = objective_value(s, channel, d);

    const auto split = utod::solve(s, channel, d);
    REQUIRE(split.feasible());
    DecisionSet trial = d;
    trial.offload_bits = split.offload_bits;
    trial.bandwidth_frac = cra::solve(s, channel, trial.offload_bits).bandwidth_frac;
    const double z_split = objective_value(s, channel, trial);
    if (z_split <= z0) CHECK(z0 - z_split <= opt.outer_tol * z0 * 2.0);

    const auto placement = uad::solve(s, channel, d.offload_bits, d.bandwidth_frac, d);
    const double z_place = objective_value(s, channel, placement.relaxed);
    if (z_place <= z0) CHECK(z0 - z_place <= opt.outer_tol * z0 * 2.0);
}

TEST_CASE("an unmeetable user budget is reported, not silently patched") {
    auto s = generate_random(2, 4, 400.0, 233);
    s.users[1].energy_budget = 1e-15;
    const auto report = orchestrator::solve(s);
    CHECK(!report.feasible());
    CHECK(report.failure.find("user") != std::string::npos);
    CHECK(report.failure.find("1") != std::string::npos);
}
