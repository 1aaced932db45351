#ifndef UAVMEC_BASELINES_HPP_
#define UAVMEC_BASELINES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "uavmec/uad.hpp"

namespace uavmec {
namespace baselines {

struct BaselineResult {
    std::string scheme;
    DecisionSet decisions;
    double objective = 0.0;        // authoritative evaluator
    double mean_latency_ms = 0.0;
    double bs_offloaded_bits = 0.0;
    double total_offloaded_bits = 0.0;
    double surrogate_objective = 0.0;  // frozen program value (centralized only)
    double runtime_s = 0.0;
    EnergyReport energy;
};

/// Joint projected-gradient solve of the same frozen convex placement
/// program the ADMM decomposes, with the consensus equality eliminated
/// (phi = 1 - theta - sum gamma kept in [0,1] by a per-user halfspace).
/// Refreezes the cross loads around the solve like the distributed method.
BaselineResult centralized(const NetworkScenario& scenario, const ChannelState& channel,
                           const std::vector<double>& offload_bits,
                           const std::vector<double>& bandwidth_frac,
                           const DecisionSet& reference, int refreeze_passes = 8);

/// Neighbor scan in decreasing link-rate order; a task is forwarded to the
/// first neighbor whose remaining capacity covers its CPU demand, the home
/// UAV serving first and the BS absorbing the overflow.
BaselineResult greedy(const NetworkScenario& scenario, const ChannelState& channel,
                      const std::vector<double>& offload_bits,
                      const std::vector<double>& bandwidth_frac);

/// Exact optimum of the one-hot placement problem by full enumeration.
/// Refuses when the assignment count exceeds size_guard.
BaselineResult exhaustive(const NetworkScenario& scenario, const ChannelState& channel,
                          const std::vector<double>& offload_bits,
                          const std::vector<double>& bandwidth_frac,
                          std::uint64_t size_guard = 10'000'000);

/// Home UAV serves users in ascending CPU-demand order up to capacity;
/// everything else goes straight to the BS (no inter-UAV forwarding).
BaselineResult non_collaboration(const NetworkScenario& scenario, const ChannelState& channel,
                                 const std::vector<double>& offload_bits,
                                 const std::vector<double>& bandwidth_frac);

/// beta = 1/|U_v| for every user of UAV v.
std::vector<double> bandwidth_uniform(const NetworkScenario& scenario);

/// beta_u = alpha_u / sum of the UAV's offloaded bits.
std::vector<double> bandwidth_proportional(const NetworkScenario& scenario,
                                           const std::vector<double>& offload_bits);

}  // namespace baselines
}  // namespace uavmec

#endif  // UAVMEC_BASELINES_HPP_
