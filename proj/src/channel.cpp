#include "uavmec/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace uavmec {

namespace {
constexpr double kPi = std::numbers::pi;
}

double a2g_distance(const UserNode& user, const UavNode& uav) {
    const double dx = uav.x - user.x;
    const double dy = uav.y - user.y;
    return std::sqrt(dx * dx + dy * dy + uav.altitude_m * uav.altitude_m);
}

double los_probability(const UserNode& user, const UavNode& uav, double env_c, double env_d) {
    const double dx = uav.x - user.x;
    const double dy = uav.y - user.y;
    const double d_horiz = std::sqrt(dx * dx + dy * dy);
    // atan(h/0) -> pi/2: elevation 90 degrees for a user directly underneath.
    const double elev_deg = (180.0 / kPi) * std::atan2(uav.altitude_m, d_horiz);
    return 1.0 / (1.0 + env_c * std::exp(-env_d * (elev_deg - env_c)));
}

double a2g_pathloss_db(const UserNode& user, const UavNode& uav, const RadioParams& radio) {
    const double d = a2g_distance(user, uav);
    if (!(d > 0)) throw ValidationError("a2g_pathloss: distance must be > 0");
    const double base =
        2.0 * radio.pathloss_exponent *
        std::log10(4.0 * kPi * d * radio.carrier_a2g / constants::speed_of_light);
    const double pr_los = los_probability(user, uav, radio.env_c, radio.env_d);
    return pr_los * (base + radio.added_loss_los_db) + (1.0 - pr_los) * (base + radio.added_loss_nlos_db);
}

double uplink_rate(double bandwidth_frac, double bandwidth_hz, double spectral_efficiency) {
    return bandwidth_frac * bandwidth_hz * spectral_efficiency;
}

double a2a_rate(const UavNode& v, const UavNode& w, const RadioParams& radio) {
    const double dx = w.x - v.x;
    const double dy = w.y - v.y;
    const double dz = w.altitude_m - v.altitude_m;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (!(d > 0)) throw ValidationError("a2a_rate: UAVs are co-located");
    const double theta_db = 20.0 * std::log10(d) + 20.0 * std::log10(radio.carrier_a2g) +
                            10.0 * std::log10(std::pow(2.0 * kPi / constants::speed_of_light, 2));
    const double gain = std::pow(10.0, -(theta_db + radio.a2a_attenuation_db) / 10.0);
    const double snr = v.tx_power_a2a * gain / radio.noise_power;
    return radio.a2a_bandwidth * std::log2(1.0 + snr);
}

double backhaul_rx_power(const UavNode& v, const BaseStation& bs, const RadioParams& radio) {
    const double dx = bs.x - v.x;
    const double dy = bs.y - v.y;
    const double d = std::sqrt(dx * dx + dy * dy + v.altitude_m * v.altitude_m);
    const double friis =
        std::pow(constants::speed_of_light / (4.0 * kPi * d * radio.carrier_mm),
                 static_cast<double>(radio.friis_exponent));
    return v.tx_power_backhaul * db_to_linear(radio.uav_tx_antenna_gain_db) *
           db_to_linear(bs.rx_antenna_gain_db) * friis;
}

double backhaul_rate(const UavNode& v, const BaseStation& bs, const RadioParams& radio) {
    const double p_rx = backhaul_rx_power(v, bs, radio);
    return radio.mmwave_bandwidth *
           std::log2(1.0 + p_rx / (radio.mmwave_bandwidth * radio.noise_power));
}

ChannelState ChannelState::compute(const NetworkScenario& s) {
    ChannelState ch;
    ch.num_users = static_cast<int>(s.users.size());
    ch.num_uavs = static_cast<int>(s.uavs.size());
    ch.a2g_dist.resize(ch.num_users * ch.num_uavs);
    ch.a2g_gain.resize(ch.num_users * ch.num_uavs);
    ch.spectral_eff.resize(ch.num_users * ch.num_uavs);
    for (const auto& u : s.users) {
        for (const auto& v : s.uavs) {
            const int k = u.id * ch.num_uavs + v.id;
            ch.a2g_dist[k] = a2g_distance(u, v);
            ch.a2g_gain[k] = std::pow(10.0, -a2g_pathloss_db(u, v, s.radio) / 10.0);
            ch.spectral_eff[k] = std::log2(1.0 + u.tx_power * ch.a2g_gain[k] / s.radio.noise_power);
        }
    }
    ch.uav_dist.assign(ch.num_uavs * ch.num_uavs, 0.0);
    ch.uav_rate.assign(ch.num_uavs * ch.num_uavs, 0.0);
    for (const auto& v : s.uavs) {
        for (const auto& w : s.uavs) {
            if (v.id == w.id) continue;
            const int k = v.id * ch.num_uavs + w.id;
            const double dx = w.x - v.x, dy = w.y - v.y, dz = w.altitude_m - v.altitude_m;
            ch.uav_dist[k] = std::sqrt(dx * dx + dy * dy + dz * dz);
            ch.uav_rate[k] = a2a_rate(v, w, s.radio);
        }
    }
    ch.bs_rate.resize(ch.num_uavs);
    ch.bs_rx_power.resize(ch.num_uavs);
    for (const auto& v : s.uavs) {
        ch.bs_rate[v.id] = backhaul_rate(v, s.bs, s.radio);
        ch.bs_rx_power[v.id] = backhaul_rx_power(v, s.bs, s.radio);
    }
    return ch;
}

std::string channel_to_csv(const NetworkScenario& s, const ChannelState& ch) {
    std::ostringstream out;
    out.precision(17);
    out << "link_type,a,b,distance_m,gain,spectral_eff,rate_bits_per_s\n";
    for (const auto& u : s.users) {
        const int v = u.home_uav;
        out << "a2g," << u.id << "," << v << "," << ch.dist(u.id, v) << "," << ch.gain(u.id, v)
            << "," << ch.gamma(u.id, v) << ",\n";
    }
    for (const auto& v : s.uavs)
        for (const auto& w : s.uavs)
            if (v.id != w.id)
                out << "a2a," << v.id << "," << w.id << "," << ch.uav_dist[v.id * ch.num_uavs + w.id]
                    << ",,," << ch.rate_a2a(v.id, w.id) << "\n";
    for (const auto& v : s.uavs)
        out << "backhaul," << v.id << ",bs,,,," << ch.bs_rate[v.id] << "\n";
    return out.str();
}

}  // namespace uavmec
