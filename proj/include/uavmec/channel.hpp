#ifndef UAVMEC_CHANNEL_HPP_
#define UAVMEC_CHANNEL_HPP_

#include <string>
#include <vector>

#include "uavmec/scenario.hpp"

namespace uavmec {

/// Air-to-ground distance between a user and a UAV (the UAV's altitude is
/// the vertical leg).
double a2g_distance(const UserNode& user, const UavNode& uav);

/// Probability of a line-of-sight link as a function of the elevation angle
/// of the UAV seen from the user. env_c/env_d are the environment constants.
double los_probability(const UserNode& user, const UavNode& uav, double env_c, double env_d);

/// Expected air-to-ground path loss in dB: the LoS/NLoS blend of the
/// free-space-style loss 2n*log10(4*pi*d*f/c) plus the added losses.
double a2g_pathloss_db(const UserNode& user, const UavNode& uav, const RadioParams& radio);

/// R = beta * B * Gamma, the user's share of the UAV uplink.
double uplink_rate(double bandwidth_frac, double bandwidth_hz, double spectral_efficiency);

/// Achievable rate of the LoS inter-UAV link.
double a2a_rate(const UavNode& v, const UavNode& w, const RadioParams& radio);

/// mmWave backhaul rate UAV -> BS. The received power uses the Friis term
/// (c / (4 pi d f))^friis_exponent with antenna gains converted from dB.
double backhaul_rate(const UavNode& v, const BaseStation& bs, const RadioParams& radio);
double backhaul_rx_power(const UavNode& v, const BaseStation& bs, const RadioParams& radio);

/// Every link-quality quantity the solvers need, precomputed once from a
/// scenario. A pure function of the scenario: recomputing yields identical
/// values.
struct ChannelState {
    int num_users = 0;
    int num_uavs = 0;
    // indexed [user * num_uavs + uav]
    std::vector<double> a2g_dist;
    std::vector<double> a2g_gain;
    std::vector<double> spectral_eff;  // bits/s/Hz
    // indexed [v * num_uavs + w]; diagonal unused (0)
    std::vector<double> uav_dist;
    std::vector<double> uav_rate;  // bits/s
    // indexed [v]
    std::vector<double> bs_rate;      // bits/s
    std::vector<double> bs_rx_power;  // W

    double gain(int user, int uav) const { return a2g_gain[user * num_uavs + uav]; }
    double gamma(int user, int uav) const { return spectral_eff[user * num_uavs + uav]; }
    double dist(int user, int uav) const { return a2g_dist[user * num_uavs + uav]; }
    double rate_a2a(int v, int w) const { return uav_rate[v * num_uavs + w]; }

    static ChannelState compute(const NetworkScenario& scenario);
};

/// Debug dump, one row per link (used by the harness).
std::string channel_to_csv(const NetworkScenario& scenario, const ChannelState& channel);

}  // namespace uavmec

#endif  // UAVMEC_CHANNEL_HPP_
