#ifndef UAVMEC_CRA_HPP_
#define UAVMEC_CRA_HPP_

#include <vector>

#include "uavmec/cost.hpp"

namespace uavmec {
namespace cra {

struct Options {
    double step_constant = 0.1;  // m in the diminishing step m/sqrt(i)
    double tolerance = 1e-5;     // max-norm change of beta between iterations
    int max_iter = 2000;
};

/// Nonnegative multipliers of the relaxed constraints plus step bookkeeping.
struct DualState {
    std::vector<double> energy_mult;     // per user, energy constraint
    std::vector<double> bandwidth_mult;  // per UAV, sum-of-shares constraint
    std::vector<double> bandwidth_step_scale;  // per UAV, warm-start scale of the xi step
    int iteration = 0;
    double step_constant = 0.1;
};

struct TracePoint {
    int iteration;
    std::vector<double> beta;
    std::vector<double> rate;
};

struct Solution {
    std::vector<double> bandwidth_frac;
    DualState duals;
    std::vector<TracePoint> trace;
    int iterations = 0;
    bool converged = false;
};

/// KKT closed form: beta* = sqrt(alpha (1 + zeta P) / (xi B Gamma)), clipped
/// to [0,1]. xi must be positive when alpha > 0.
double beta_closed_form(double alpha, double zeta, double xi, double bandwidth,
                        double spectral_eff, double tx_power);

/// One projected subgradient ascent step on (zeta, xi) at the current beta.
void subgradient_step(DualState& state, const std::vector<double>& beta,
                      const NetworkScenario& scenario, const ChannelState& channel,
                      const std::vector<double>& offload_bits);

/// Dual ascent with the closed-form primal update, run independently per
/// UAV. Users with alpha = 0 get beta = 0 and release their bandwidth. The
/// returned shares satisfy the per-UAV sum constraint after a final
/// normalization.
Solution solve(const NetworkScenario& scenario, const ChannelState& channel,
               const std::vector<double>& offload_bits, const Options& options = Options{});

}  // namespace cra
}  // namespace uavmec

#endif  // UAVMEC_CRA_HPP_
