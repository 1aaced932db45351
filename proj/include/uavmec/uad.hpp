#ifndef UAVMEC_UAD_HPP_
#define UAVMEC_UAD_HPP_

#include <optional>
#include <string>
#include <vector>

#include "uavmec/cost.hpp"

namespace uavmec {
namespace uad {

struct Halfspace {
    std::vector<double> coeff;  // nonnegative in every set we build
    double rhs = 0.0;
    std::string name;
};

/// Feasible set of one placement block: the unit box intersected with up to
/// one compute-capacity and one energy halfspace.
struct FeasibleSet {
    int dim = 0;
    std::optional<Halfspace> capacity;
    std::optional<Halfspace> energy;
};

/// Euclidean projection onto the set (weighted when `weights` is nonempty),
/// via Dykstra's alternating projections. Throws InfeasibleError when the
/// set is empty, naming the violated budget.
std::vector<double> project_feasible(const std::vector<double>& point, const FeasibleSet& set,
                                     const std::vector<double>& weights = {});

struct AdmmOptions {
    double rho = 10.0;
    double eps_primal = 1e-4;
    double eps_dual = 1e-5;
    int max_iter = 500;
    // cross-load refreeze passes around the Algorithm-2 loop; 1 solves the
    // incoming frozen program only
    int refreeze_passes = 8;
};

/// The frozen convex placement program of one home UAV: normalized linear
/// plus own-load quadratic coefficients per (user, site), and a feasible set
/// per site.
struct UavProblem {
    int home_uav = -1;
    std::vector<int> users;     // global ids, ascending
    int num_sites = 0;          // V + 1, BS last
    std::vector<double> lin;    // [local * num_sites + site]
    std::vector<double> quad;   // same indexing, >= 0
    std::vector<FeasibleSet> omega;  // per site
    double scale = 1.0;         // latency units per normalized unit

    int at(int local, int site) const { return local * num_sites + site; }
};

/// Block values of one UAV's ADMM: x[site][local user] plus the consensus
/// multiplier per user.
struct AdmmState {
    std::vector<std::vector<double>> blocks;
    std::vector<double> dual;
    int iteration = 0;

    std::vector<double> consensus_sum() const;
};

struct TracePoint {
    int iteration = 0;
    double objective = 0.0;        // frozen objective, latency units
    double primal_residual = 0.0;  // ||sum^{t+1} - sum^t||_2 stacked over UAVs
    double dual_residual = 0.0;    // ||lambda^{t+1} - lambda^t||_2
    double consensus = 0.0;        // ||theta + gamma + phi - 1||_2
    bool monotone = true;          // all block stages decreased the Lagrangian
};

struct PlacementSolution {
    DecisionSet relaxed;
    DecisionSet rounded;
    int iterations = 0;
    bool converged = false;
    std::vector<TracePoint> trace;
    std::vector<std::string> repair_log;
    double relaxed_objective = 0.0;    // authoritative evaluator
    double rounded_objective = 0.0;
    double surrogate_objective = 0.0;  // frozen convex program value at relaxed
    bool lagrangian_monotone = true;
};

/// Builds every UAV's frozen program from the model and the energy flags.
/// Shared normalization scale across UAVs.
std::vector<UavProblem> build_problems(const NetworkScenario& scenario,
                                       const FrozenCostModel& model,
                                       const StructuralFlags& flags,
                                       const DecisionSet& reference,
                                       const CostBreakdown& reference_costs);

/// The whole frozen convex placement program at fixed (alpha, beta): the
/// same object the ADMM iterates on and the centralized baseline solves
/// jointly.
struct FrozenPlacementProgram {
    FrozenCostModel model;
    StructuralFlags flags;
    std::vector<UavProblem> problems;
    DecisionSet reference;

    /// Frozen objective (latency units) of a decision set's placement.
    double objective(const NetworkScenario& scenario, const DecisionSet& decisions) const;
};

FrozenPlacementProgram build_program(const NetworkScenario& scenario, const ChannelState& channel,
                                     const std::vector<double>& offload_bits,
                                     const std::vector<double>& bandwidth_frac,
                                     const DecisionSet& reference);

/// Exact minimizer of one block given the others' consensus contribution
/// `rest` and the multiplier: a weighted projection of the unconstrained
/// separable-quadratic argmin onto the block's feasible set.
std::vector<double> block_update(const UavProblem& problem, int site,
                                 const std::vector<double>& rest,
                                 const std::vector<double>& dual, double rho);

/// lambda <- lambda + rho (theta + gamma + phi - 1).
void dual_update(const UavProblem& problem, AdmmState& state, double rho);

/// Augmented Lagrangian of one UAV's program at the given blocks (normalized
/// units).
double augmented_lagrangian(const UavProblem& problem, const AdmmState& state, double rho);

/// Full ADMM solve of the placement subproblem at fixed (alpha, beta), with
/// cross-user loads frozen at `reference`. Rounds the relaxed solution.
PlacementSolution solve(const NetworkScenario& scenario, const ChannelState& channel,
                        const std::vector<double>& offload_bits,
                        const std::vector<double>& bandwidth_frac,
                        const DecisionSet& reference, const AdmmOptions& options = AdmmOptions{});

// --- binary placements -------------------------------------------------------

/// site per user (0..V-1 = UAVs, V = BS, -1 = unassigned)
using Assignment = std::vector<int>;

struct AssignmentEval {
    double objective = 0.0;
    bool feasible = false;
    std::string violated;  // first violated enforceable budget
};

/// Objective and enforceable-energy feasibility of a (possibly partial)
/// one-hot placement. Matches `evaluate` on the equivalent DecisionSet.
AssignmentEval evaluate_assignment(const NetworkScenario& scenario, const ChannelState& channel,
                                   const std::vector<double>& offload_bits,
                                   const std::vector<double>& bandwidth_frac,
                                   const Assignment& assignment, const StructuralFlags& flags);

DecisionSet assignment_to_decisions(const NetworkScenario& scenario,
                                    const std::vector<double>& offload_bits,
                                    const std::vector<double>& bandwidth_frac,
                                    const Assignment& assignment);

/// Argmax rounding with a greedy repair pass in descending relaxed-value
/// order; the repaired placement satisfies the same feasibility predicate the
/// exhaustive baseline enumerates under.
DecisionSet round_placements(const NetworkScenario& scenario, const ChannelState& channel,
                             const DecisionSet& relaxed,
                             std::vector<std::string>* repair_log = nullptr);

}  // namespace uad
}  // namespace uavmec

#endif  // UAVMEC_UAD_HPP_
