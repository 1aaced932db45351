#ifndef UAVMEC_UTOD_HPP_
#define UAVMEC_UTOD_HPP_

#include <vector>

#include "uavmec/cost.hpp"

namespace uavmec {
namespace utod {

/// Active-constraint flags of one user's interval solution.
struct ActiveConstraint {
    bool box_lower = false;
    bool box_upper = false;
    bool energy = false;
};

struct Solution {
    std::vector<double> offload_bits;
    double objective = 0.0;  // frozen-model objective at the solution
    std::vector<ActiveConstraint> active;
    std::vector<int> infeasible_users;  // energy budget unmeetable at any alpha
    bool feasible() const { return infeasible_users.empty(); }
};

/// dZ/dalpha_u of the frozen objective. Constant in alpha (the subproblem is
/// linear); infinite when an active path has zero rate or share.
double per_user_cost_slope(const NetworkScenario& scenario, const FrozenCostModel& model,
                           const DecisionSet& fixed, int user);

/// Exact solution of the per-user interval LP: slope sign picks the boundary
/// of [0, S] intersected with the closed-form energy interval; a zero slope
/// keeps the incoming alpha.
Solution solve(const NetworkScenario& scenario, const ChannelState& channel,
               const DecisionSet& incoming);

}  // namespace utod
}  // namespace uavmec

#endif  // UAVMEC_UTOD_HPP_
