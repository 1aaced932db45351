#ifndef UAVMEC_ORCHESTRATOR_HPP_
#define UAVMEC_ORCHESTRATOR_HPP_

#include <string>
#include <vector>

#include "uavmec/cra.hpp"
#include "uavmec/uad.hpp"
#include "uavmec/utod.hpp"

namespace uavmec {
namespace orchestrator {

enum class PlacementMethod {
    admm,         // distributed ADMM (the proposed method)
    centralized,  // joint projected-gradient solve of the same frozen program
};

struct Options {
    double outer_tol = 1e-4;
    int outer_max = 30;
    cra::Options cra;
    uad::AdmmOptions admm;
    PlacementMethod placement = PlacementMethod::admm;
};

struct OuterIterate {
    int iteration = 0;
    double objective = 0.0;
    bool utod_accepted = false;
    bool cra_accepted = false;
    bool uad_accepted = false;
    double utod_seconds = 0.0;
    double cra_seconds = 0.0;
    double uad_seconds = 0.0;
};

/// Authoritative result of one block-coordinate-descent run.
struct SolveReport {
    DecisionSet relaxed;
    DecisionSet rounded;
    double relaxed_objective = 0.0;
    double rounded_objective = 0.0;
    double mean_latency_ms = 0.0;  // relaxed Z / |U| in milliseconds
    std::vector<double> outer_objectives;
    std::vector<OuterIterate> outer_trace;
    CostBreakdown breakdown;  // at the relaxed solution
    EnergyReport energy;
    cra::Solution last_cra;
    uad::PlacementSolution last_placement;
    DecisionSet final_reference;  // decisions entering the last placement solve
    bool converged = false;
    int iterations = 0;
    std::string failure;  // nonempty on block infeasibility, with diagnosis
    bool feasible() const { return failure.empty(); }
};

/// Alternates UTOD -> CRA -> UAD from the canonical start (alpha = S/2,
/// uniform beta, all-home placement) until the objective stabilizes. Each
/// block's proposal is kept only if the authoritative objective does not
/// increase, so the outer objective trace is non-increasing.
SolveReport solve(const NetworkScenario& scenario, const Options& options = Options{});

/// include_timings=false gives a byte-stable serialization for a fixed
/// (scenario, options) pair.
std::string report_to_json(const NetworkScenario& scenario, const SolveReport& report,
                           bool include_timings = true);

}  // namespace orchestrator
}  // namespace uavmec

#endif  // UAVMEC_ORCHESTRATOR_HPP_
