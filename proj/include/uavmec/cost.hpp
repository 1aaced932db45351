#ifndef UAVMEC_COST_HPP_
#define UAVMEC_COST_HPP_

#include <string>
#include <vector>

#include "uavmec/channel.hpp"
#include "uavmec/scenario.hpp"

namespace uavmec {

/// The five decision blocks at one iterate. Indicator entries are relaxed
/// (in [0,1]) during the solve and one-hot after rounding.
struct DecisionSet {
    std::vector<double> offload_bits;    // per user, in [0, S_u]
    std::vector<double> bandwidth_frac;  // per user, share of the home UAV band
    std::vector<double> home_weight;     // per user: execute at the home UAV
    std::vector<double> neighbor_weight; // [user * num_uavs + w]; home column 0
    std::vector<double> bs_weight;       // per user: execute at the BS
    int num_uavs = 0;

    double neighbor(int user, int w) const { return neighbor_weight[user * num_uavs + w]; }
    double& neighbor(int user, int w) { return neighbor_weight[user * num_uavs + w]; }

    /// theta + sum(gamma) + phi for one user.
    double placement_sum(int user) const;

    /// True when every user's placement is a exact one-hot vector.
    bool is_one_hot(double tol = 1e-9) const;

    static DecisionSet zeros(const NetworkScenario& scenario);
    /// alpha = S/2, beta uniform per UAV, theta = 1 (all-home one-hot).
    static DecisionSet initial(const NetworkScenario& scenario);

    void validate(const NetworkScenario& scenario) const;
};

/// Site ids: 0..V-1 are the UAVs, V is the BS.
inline int bs_site(const NetworkScenario& s) { return static_cast<int>(s.uavs.size()); }

// --- scalar cost expressions ---------------------------------------------

struct TimeEnergy {
    double time = 0.0;
    double energy = 0.0;
};

/// Local execution of the (S - alpha) remainder.
TimeEnergy local_cost(const UserNode& user, double offload_bits);

/// Uplink of the offloaded bits at rate R. alpha > 0 with R = 0 is an
/// infeasible-rate error; alpha = 0 costs nothing regardless of R.
TimeEnergy upload_cost(const UserNode& user, double offload_bits, double rate);

/// Proportional CPU split of f_max over the weighted loads (Eq. 16 form):
/// share_u = load_u / sum(loads) * f_max. All-zero loads give all-zero shares.
std::vector<double> proportional_cpu_share(const std::vector<double>& loads, double f_max);

/// Remote execution of alpha bits on a CPU share.
TimeEnergy compute_cost(double offload_bits, double cycles_per_bit, double cpu_share,
                        double chip_constant);

/// Batch forwarding totals for one link (used for UAV energy and hover).
TimeEnergy forward_cost(double forwarded_bits, double rate, double tx_power);

/// Rotor power while hovering.
double hover_power(const HoverParams& hover);

// --- full evaluation -------------------------------------------------------

struct UserCosts {
    double t_loc = 0.0;
    double e_loc = 0.0;
    double t_up = 0.0;           // raw uplink time alpha/R
    double e_up = 0.0;
    // indicator-weighted stage latencies; their sum plus t_loc is the user's
    // contribution to Z
    double t_up_weighted = 0.0;
    double t_comp_home = 0.0;
    double t_a2a_com = 0.0;
    double t_comp_neighbor = 0.0;
    double t_bs_com = 0.0;
    double t_comp_bs = 0.0;
    double t_off = 0.0;
    double total_latency = 0.0;
    bool deadline_violated = false;
};

struct UavCosts {
    double e_comp = 0.0;     // home-executed compute energy
    double e_fwd_a2a = 0.0;
    double e_fwd_bs = 0.0;
    double e_hov = 0.0;
    double e_total = 0.0;
    double t_hov = 0.0;
    double objective = 0.0;  // Z_v
};

struct CostBreakdown {
    std::vector<UserCosts> users;
    std::vector<UavCosts> uavs;
    double objective = 0.0;  // Z = sum of Z_v
    std::vector<int> deadline_violations;
};

/// Authoritative objective: pools are the indicator-weighted loads at each
/// site, shares follow Eq. (16), link latency is attributed per user. Works
/// for relaxed and one-hot decisions alike.
CostBreakdown evaluate(const NetworkScenario& scenario, const ChannelState& channel,
                       const DecisionSet& decisions);

double objective_value(const NetworkScenario& scenario, const ChannelState& channel,
                       const DecisionSet& decisions);

std::string breakdown_to_csv(const NetworkScenario& scenario, const CostBreakdown& breakdown);

// --- frozen linearization ---------------------------------------------------

/// Per-(user, site) coefficients with cross-user loads frozen at a reference
/// decision set. The solver blocks optimize against this model; one outer
/// BCD pass refreshes it.
struct FrozenCostModel {
    int num_users = 0;
    int num_sites = 0;  // V + 1

    std::vector<double> uplink_time;     // alpha_u / R_u
    std::vector<double> inv_uplink_rate; // 1 / R_u
    std::vector<double> pricing_inv_uplink;  // 1/R, falling back to the uniform
                                             // bandwidth share when beta = 0 so a
                                             // locked-out user can still price entry
    std::vector<double> link_time;       // [u*S+s] alpha_u / R_link (0 for home)
    std::vector<double> inv_link_rate;   // [u*S+s]
    std::vector<double> other_load;      // [u*S+s] frozen cross-user load at s
    std::vector<double> frozen_share;    // [u*S+s] Eq. (16) share at the reference (0 when alpha = 0)
    std::vector<double> pricing_share;   // [u*S+s] what-if share at the full task size; prices
                                         //         the offloading vertex for the split solver
    std::vector<double> self_quad;       // [u*S+s] C_u * alpha_u / F_s
    std::vector<double> chain_const;     // [u*S+s] uplink + link + C_u * L_other / F_s (0 when alpha = 0)

    int site(int user, int s) const { return user * num_sites + s; }

    /// Chain latency of user u fully placed at site s, with cross loads
    /// frozen: uplink + link + C_u (L_other + alpha_u) / F_s.
    double chain_what_if(int user, int s) const {
        return chain_const[site(user, s)] + self_quad[site(user, s)];
    }

    static FrozenCostModel build(const NetworkScenario& scenario, const ChannelState& channel,
                                 const std::vector<double>& offload_bits,
                                 const std::vector<double>& bandwidth_frac,
                                 const DecisionSet& reference);
};

/// Z with shares frozen at the model's reference: linear in each indicator
/// block and in alpha. Used by the slope oracle and the linearity tests.
double objective_frozen(const NetworkScenario& scenario, const FrozenCostModel& model,
                        const DecisionSet& decisions);

// --- energy feasibility ------------------------------------------------------

struct EnergyConstraint {
    std::string name;
    double lhs = 0.0;
    double budget = 0.0;
    double slack = 0.0;       // budget - lhs
    bool satisfied = false;
    bool structural = false;  // even the cheapest engagement exceeds the budget
};

struct EnergyReport {
    std::vector<EnergyConstraint> user_energy;    // E_loc + E_up <= E_u_max
    std::vector<EnergyConstraint> uav_total;      // Eq. (36) total <= E_v_max
    std::vector<EnergyConstraint> neighbor_pairs; // forwarded compute + hover <= E_w_max

    bool all_satisfied() const;
    /// Ignores constraints marked structural (unsatisfiable by any placement).
    bool enforceable_satisfied() const;
};

EnergyReport check_energy_budgets(const NetworkScenario& scenario, const ChannelState& channel,
                                  const DecisionSet& decisions);

/// Structural flags at a fixed (alpha, beta) context: true when no placement
/// can satisfy the budget (the hover floor alone exceeds it).
struct StructuralFlags {
    std::vector<bool> uav_total;                   // per v
    std::vector<bool> neighbor_pair;               // [v * V + w]
    bool pair(int v, int w, int num_uavs) const { return neighbor_pair[v * num_uavs + w]; }
};

StructuralFlags structural_energy_flags(const NetworkScenario& scenario, const ChannelState& channel,
                                        const std::vector<double>& offload_bits,
                                        const std::vector<double>& bandwidth_frac);

}  // namespace uavmec

#endif  // UAVMEC_COST_HPP_
