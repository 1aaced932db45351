#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavmec/baselines.hpp"
#include "uavmec/harness.hpp"
#include "uavmec/orchestrator.hpp"

namespace py = pybind11;
using namespace uavmec;

PYBIND11_MODULE(_core, m) {
    m.doc() = "collaborative UAV MEC offloading solver";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<InfeasibleError>(m, "InfeasibleError");

    // --- scenario ---------------------------------------------------------
    py::class_<TaskProfile>(m, "TaskProfile")
        .def(py::init<>())
        .def_readwrite("input_size_bits", &TaskProfile::input_size_bits)
        .def_readwrite("cycles_per_bit", &TaskProfile::cycles_per_bit)
        .def_readwrite("deadline_s", &TaskProfile::deadline_s);

    py::class_<UserNode>(m, "UserNode")
        .def(py::init<>())
        .def_readwrite("id", &UserNode::id)
        .def_readwrite("x", &UserNode::x)
        .def_readwrite("y", &UserNode::y)
        .def_readwrite("local_cpu", &UserNode::local_cpu)
        .def_readwrite("tx_power", &UserNode::tx_power)
        .def_readwrite("energy_budget", &UserNode::energy_budget)
        .def_readwrite("chip_constant", &UserNode::chip_constant)
        .def_readwrite("task", &UserNode::task)
        .def_readwrite("home_uav", &UserNode::home_uav);

    py::class_<HoverParams>(m, "HoverParams")
        .def(py::init<>())
        .def_readwrite("thrust_n", &HoverParams::thrust_n)
        .def_readwrite("power_efficiency", &HoverParams::power_efficiency)
        .def_readwrite("rotor_count", &HoverParams::rotor_count)
        .def_readwrite("rotor_diameter_m", &HoverParams::rotor_diameter_m)
        .def_readwrite("air_density", &HoverParams::air_density);

    py::class_<UavNode>(m, "UavNode")
        .def(py::init<>())
        .def_readwrite("id", &UavNode::id)
        .def_readwrite("x", &UavNode::x)
        .def_readwrite("y", &UavNode::y)
        .def_readwrite("altitude_m", &UavNode::altitude_m)
        .def_readwrite("cpu_capacity", &UavNode::cpu_capacity)
        .def_readwrite("tx_power_a2a", &UavNode::tx_power_a2a)
        .def_readwrite("tx_power_backhaul", &UavNode::tx_power_backhaul)
        .def_readwrite("energy_budget", &UavNode::energy_budget)
        .def_readwrite("chip_constant", &UavNode::chip_constant)
        .def_readwrite("hover", &UavNode::hover);

    py::class_<BaseStation>(m, "BaseStation")
        .def(py::init<>())
        .def_readwrite("x", &BaseStation::x)
        .def_readwrite("y", &BaseStation::y)
        .def_readwrite("z", &BaseStation::z)
        .def_readwrite("cpu_capacity", &BaseStation::cpu_capacity)
        .def_readwrite("rx_antenna_gain_db", &BaseStation::rx_antenna_gain_db);

    py::class_<RadioParams>(m, "RadioParams")
        .def(py::init<>())
        .def_readwrite("a2g_bandwidth_per_uav", &RadioParams::a2g_bandwidth_per_uav)
        .def_readwrite("a2a_bandwidth", &RadioParams::a2a_bandwidth)
        .def_readwrite("mmwave_bandwidth", &RadioParams::mmwave_bandwidth)
        .def_readwrite("carrier_a2g", &RadioParams::carrier_a2g)
        .def_readwrite("carrier_mm", &RadioParams::carrier_mm)
        .def_readwrite("noise_power", &RadioParams::noise_power)
        .def_readwrite("pathloss_exponent", &RadioParams::pathloss_exponent)
        .def_readwrite("env_c", &RadioParams::env_c)
        .def_readwrite("env_d", &RadioParams::env_d)
        .def_readwrite("added_loss_los_db", &RadioParams::added_loss_los_db)
        .def_readwrite("added_loss_nlos_db", &RadioParams::added_loss_nlos_db)
        .def_readwrite("a2a_attenuation_db", &RadioParams::a2a_attenuation_db)
        .def_readwrite("uav_tx_antenna_gain_db", &RadioParams::uav_tx_antenna_gain_db)
        .def_readwrite("friis_exponent", &RadioParams::friis_exponent);

    py::class_<ScenarioDefaults>(m, "ScenarioDefaults")
        .def(py::init<>())
        .def_readwrite("task_bits_min", &ScenarioDefaults::task_bits_min)
        .def_readwrite("task_bits_max", &ScenarioDefaults::task_bits_max)
        .def_readwrite("uav_cpu_min", &ScenarioDefaults::uav_cpu_min)
        .def_readwrite("uav_cpu_max", &ScenarioDefaults::uav_cpu_max)
        .def_readwrite("radio", &ScenarioDefaults::radio);

    py::class_<NetworkScenario>(m, "NetworkScenario")
        .def(py::init<>())
        .def_readwrite("users", &NetworkScenario::users)
        .def_readwrite("uavs", &NetworkScenario::uavs)
        .def_readwrite("bs", &NetworkScenario::bs)
        .def_readwrite("radio", &NetworkScenario::radio)
        .def_readwrite("rng_seed", &NetworkScenario::rng_seed)
        .def("validate", &NetworkScenario::validate)
        .def("users_of", &NetworkScenario::users_of);

    m.def("generate_random", &generate_random, py::arg("num_uavs"), py::arg("num_users"),
          py::arg("region_side_m"), py::arg("seed"),
          py::arg("defaults") = ScenarioDefaults{},
          "Random scenario with nearest-UAV association; deterministic per seed.");
    m.def("load_scenario", &load_scenario);
    m.def("save_scenario", &save_scenario);
    m.def("scenario_to_json", &scenario_to_json);
    m.def("scenario_from_json", &scenario_from_json);

    // --- channel -----------------------------------------------------------
    py::class_<ChannelState>(m, "ChannelState")
        .def_static("compute", &ChannelState::compute)
        .def_readonly("bs_rate", &ChannelState::bs_rate)
        .def("gain", &ChannelState::gain)
        .def("gamma", &ChannelState::gamma)
        .def("dist", &ChannelState::dist)
        .def("rate_a2a", &ChannelState::rate_a2a);
    m.def("a2g_distance", &a2g_distance);
    m.def("los_probability", &los_probability);
    m.def("a2g_pathloss_db", &a2g_pathloss_db);
    m.def("uplink_rate", &uplink_rate);
    m.def("a2a_rate", &a2a_rate);
    m.def("backhaul_rate", &backhaul_rate);

    // --- decisions and cost --------------------------------------------------
    py::class_<DecisionSet>(m, "DecisionSet")
        .def_static("initial", &DecisionSet::initial)
        .def_static("zeros", &DecisionSet::zeros)
        .def_readwrite("offload_bits", &DecisionSet::offload_bits)
        .def_readwrite("bandwidth_frac", &DecisionSet::bandwidth_frac)
        .def_readwrite("home_weight", &DecisionSet::home_weight)
        .def_readwrite("bs_weight", &DecisionSet::bs_weight)
        .def("neighbor", py::overload_cast<int, int>(&DecisionSet::neighbor, py::const_))
        .def("placement_sum", &DecisionSet::placement_sum)
        .def("is_one_hot", &DecisionSet::is_one_hot, py::arg("tol") = 1e-9)
        .def("validate", &DecisionSet::validate);

    py::class_<UserCosts>(m, "UserCosts")
        .def_readonly("t_loc", &UserCosts::t_loc)
        .def_readonly("t_up", &UserCosts::t_up)
        .def_readonly("t_off", &UserCosts::t_off)
        .def_readonly("total_latency", &UserCosts::total_latency)
        .def_readonly("e_loc", &UserCosts::e_loc)
        .def_readonly("e_up", &UserCosts::e_up)
        .def_readonly("deadline_violated", &UserCosts::deadline_violated);
    py::class_<UavCosts>(m, "UavCosts")
        .def_readonly("e_comp", &UavCosts::e_comp)
        .def_readonly("e_fwd_a2a", &UavCosts::e_fwd_a2a)
        .def_readonly("e_fwd_bs", &UavCosts::e_fwd_bs)
        .def_readonly("e_hov", &UavCosts::e_hov)
        .def_readonly("e_total", &UavCosts::e_total)
        .def_readonly("t_hov", &UavCosts::t_hov)
        .def_readonly("objective", &UavCosts::objective);
    py::class_<CostBreakdown>(m, "CostBreakdown")
        .def_readonly("users", &CostBreakdown::users)
        .def_readonly("uavs", &CostBreakdown::uavs)
        .def_readonly("objective", &CostBreakdown::objective)
        .def_readonly("deadline_violations", &CostBreakdown::deadline_violations);
    m.def("evaluate", &evaluate, "Authoritative objective and per-user/per-UAV breakdown.");
    m.def("objective_value", &objective_value);

    py::class_<EnergyConstraint>(m, "EnergyConstraint")
        .def_readonly("name", &EnergyConstraint::name)
        .def_readonly("lhs", &EnergyConstraint::lhs)
        .def_readonly("budget", &EnergyConstraint::budget)
        .def_readonly("slack", &EnergyConstraint::slack)
        .def_readonly("satisfied", &EnergyConstraint::satisfied)
        .def_readonly("structural", &EnergyConstraint::structural);
    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("user_energy", &EnergyReport::user_energy)
        .def_readonly("uav_total", &EnergyReport::uav_total)
        .def_readonly("neighbor_pairs", &EnergyReport::neighbor_pairs)
        .def("all_satisfied", &EnergyReport::all_satisfied)
        .def("enforceable_satisfied", &EnergyReport::enforceable_satisfied);
    m.def("check_energy_budgets", &check_energy_budgets);

    // --- solver blocks --------------------------------------------------------
    py::class_<cra::Options>(m, "CraOptions")
        .def(py::init<>())
        .def_readwrite("step_constant", &cra::Options::step_constant)
        .def_readwrite("tolerance", &cra::Options::tolerance)
        .def_readwrite("max_iter", &cra::Options::max_iter);
    py::class_<cra::Solution>(m, "CraSolution")
        .def_readonly("bandwidth_frac", &cra::Solution::bandwidth_frac)
        .def_readonly("iterations", &cra::Solution::iterations)
        .def_readonly("converged", &cra::Solution::converged);
    m.def("solve_bandwidth", &cra::solve, py::arg("scenario"), py::arg("channel"),
          py::arg("offload_bits"), py::arg("options") = cra::Options{},
          "Lagrangian dual ascent with the closed-form share update.");

    py::class_<utod::Solution>(m, "UtodSolution")
        .def_readonly("offload_bits", &utod::Solution::offload_bits)
        .def_readonly("objective", &utod::Solution::objective)
        .def_readonly("infeasible_users", &utod::Solution::infeasible_users);
    m.def("solve_task_split", &utod::solve, py::arg("scenario"), py::arg("channel"),
          py::arg("incoming"), "Per-user interval LP on the offloaded bits.");

    py::class_<uad::AdmmOptions>(m, "AdmmOptions")
        .def(py::init<>())
        .def_readwrite("rho", &uad::AdmmOptions::rho)
        .def_readwrite("eps_primal", &uad::AdmmOptions::eps_primal)
        .def_readwrite("eps_dual", &uad::AdmmOptions::eps_dual)
        .def_readwrite("max_iter", &uad::AdmmOptions::max_iter)
        .def_readwrite("refreeze_passes", &uad::AdmmOptions::refreeze_passes);
    py::class_<uad::TracePoint>(m, "AdmmTracePoint")
        .def_readonly("iteration", &uad::TracePoint::iteration)
        .def_readonly("objective", &uad::TracePoint::objective)
        .def_readonly("primal_residual", &uad::TracePoint::primal_residual)
        .def_readonly("dual_residual", &uad::TracePoint::dual_residual)
        .def_readonly("consensus", &uad::TracePoint::consensus)
        .def_readonly("monotone", &uad::TracePoint::monotone);
    py::class_<uad::PlacementSolution>(m, "PlacementSolution")
        .def_readonly("relaxed", &uad::PlacementSolution::relaxed)
        .def_readonly("rounded", &uad::PlacementSolution::rounded)
        .def_readonly("iterations", &uad::PlacementSolution::iterations)
        .def_readonly("converged", &uad::PlacementSolution::converged)
        .def_readonly("trace", &uad::PlacementSolution::trace)
        .def_readonly("relaxed_objective", &uad::PlacementSolution::relaxed_objective)
        .def_readonly("rounded_objective", &uad::PlacementSolution::rounded_objective);
    m.def("solve_placement", &uad::solve, py::arg("scenario"), py::arg("channel"),
          py::arg("offload_bits"), py::arg("bandwidth_frac"), py::arg("reference"),
          py::arg("options") = uad::AdmmOptions{},
          "Consensus ADMM over the placement blocks, then argmax rounding with repair.");
    m.def("round_placements", &uad::round_placements, py::arg("scenario"), py::arg("channel"),
          py::arg("relaxed"), py::arg("repair_log") = nullptr);

    // --- orchestrator -----------------------------------------------------------
    py::class_<orchestrator::Options>(m, "SolveOptions")
        .def(py::init<>())
        .def_readwrite("outer_tol", &orchestrator::Options::outer_tol)
        .def_readwrite("outer_max", &orchestrator::Options::outer_max)
        .def_readwrite("cra", &orchestrator::Options::cra)
        .def_readwrite("admm", &orchestrator::Options::admm);
    py::class_<orchestrator::SolveReport>(m, "SolveReport")
        .def_readonly("relaxed", &orchestrator::SolveReport::relaxed)
        .def_readonly("rounded", &orchestrator::SolveReport::rounded)
        .def_readonly("relaxed_objective", &orchestrator::SolveReport::relaxed_objective)
        .def_readonly("rounded_objective", &orchestrator::SolveReport::rounded_objective)
        .def_readonly("mean_latency_ms", &orchestrator::SolveReport::mean_latency_ms)
        .def_readonly("outer_objectives", &orchestrator::SolveReport::outer_objectives)
        .def_readonly("breakdown", &orchestrator::SolveReport::breakdown)
        .def_readonly("energy", &orchestrator::SolveReport::energy)
        .def_readonly("converged", &orchestrator::SolveReport::converged)
        .def_readonly("iterations", &orchestrator::SolveReport::iterations)
        .def_readonly("failure", &orchestrator::SolveReport::failure)
        .def("feasible", &orchestrator::SolveReport::feasible);
    m.def("solve", &orchestrator::solve, py::arg("scenario"),
          py::arg("options") = orchestrator::Options{},
          "Full block-coordinate run: task split, bandwidth, placement.");
    m.def("report_to_json", &orchestrator::report_to_json, py::arg("scenario"), py::arg("report"),
          py::arg("include_timings") = true);

    // --- baselines ---------------------------------------------------------------
    py::class_<baselines::BaselineResult>(m, "BaselineResult")
        .def_readonly("scheme", &baselines::BaselineResult::scheme)
        .def_readonly("decisions", &baselines::BaselineResult::decisions)
        .def_readonly("objective", &baselines::BaselineResult::objective)
        .def_readonly("mean_latency_ms", &baselines::BaselineResult::mean_latency_ms)
        .def_readonly("bs_offloaded_bits", &baselines::BaselineResult::bs_offloaded_bits)
        .def_readonly("total_offloaded_bits", &baselines::BaselineResult::total_offloaded_bits)
        .def_readonly("energy", &baselines::BaselineResult::energy);
    m.def("baseline_centralized", &baselines::centralized, py::arg("scenario"), py::arg("channel"),
          py::arg("offload_bits"), py::arg("bandwidth_frac"), py::arg("reference"),
          py::arg("refreeze_passes") = 8);
    m.def("baseline_greedy", &baselines::greedy);
    m.def("baseline_exhaustive", &baselines::exhaustive, py::arg("scenario"), py::arg("channel"),
          py::arg("offload_bits"), py::arg("bandwidth_frac"),
          py::arg("size_guard") = std::uint64_t{10'000'000});
    m.def("baseline_non_collaboration", &baselines::non_collaboration);
    m.def("bandwidth_uniform", &baselines::bandwidth_uniform);
    m.def("bandwidth_proportional", &baselines::bandwidth_proportional);

    // --- experiments ----------------------------------------------------------------
    py::class_<harness::ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("id", &harness::ExperimentSpec::id)
        .def_readwrite("num_uavs", &harness::ExperimentSpec::num_uavs)
        .def_readwrite("default_users", &harness::ExperimentSpec::default_users)
        .def_readwrite("region_side_m", &harness::ExperimentSpec::region_side_m)
        .def_readwrite("user_sweep", &harness::ExperimentSpec::user_sweep)
        .def_readwrite("rho_sweep", &harness::ExperimentSpec::rho_sweep)
        .def_readwrite("schemes", &harness::ExperimentSpec::schemes)
        .def_readwrite("repeats", &harness::ExperimentSpec::repeats)
        .def_readwrite("seed_base", &harness::ExperimentSpec::seed_base)
        .def_readwrite("out_dir", &harness::ExperimentSpec::out_dir);
    m.def("run_experiment", &harness::run);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
