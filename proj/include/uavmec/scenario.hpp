#ifndef UAVMEC_SCENARIO_HPP_
#define UAVMEC_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "uavmec/common.hpp"

namespace uavmec {

/// One user's computing task: input size (bits), per-bit CPU demand
/// (cycles/bit) and the tolerable deadline (s). Deadlines are reported by the
/// cost module, never enforced as a constraint.
struct TaskProfile {
    double input_size_bits = 0.0;
    double cycles_per_bit = 0.0;
    double deadline_s = 0.0;
};

struct UserNode {
    int id = 0;
    double x = 0.0, y = 0.0;       // ground plane, z = 0
    double local_cpu = 0.0;        // cycles/s
    double tx_power = 0.0;         // W
    double energy_budget = 0.0;    // J
    double chip_constant = 5e-27;  // J*s^2/cycle^3
    TaskProfile task;
    int home_uav = -1;
};

/// Rotor parameters feeding the hover power model.
struct HoverParams {
    double thrust_n = 30.0;
    double power_efficiency = 0.7;  // in (0, 1]
    double rotor_count = 4.0;
    double rotor_diameter_m = 0.254;
    double air_density = 1.225;  // kg/m^3
};

struct UavNode {
    int id = 0;
    double x = 0.0, y = 0.0;
    double altitude_m = 50.0;
    double cpu_capacity = 0.0;        // F_max, cycles/s
    double tx_power_a2a = 0.0;        // W
    double tx_power_backhaul = 0.0;   // W
    double energy_budget = 0.0;       // J
    double chip_constant = 5e-27;
    HoverParams hover;
};

struct BaseStation {
    double x = 0.0, y = 0.0, z = 0.0;
    double cpu_capacity = 0.0;        // cycles/s
    double rx_antenna_gain_db = -50.0;
};

struct RadioParams {
    double a2g_bandwidth_per_uav = 3e6;   // Hz, shared among a UAV's users
    double a2a_bandwidth = 1.7e6;         // Hz per UAV-UAV link
    double mmwave_bandwidth = 1.8e6;      // Hz, UAV->BS backhaul
    double carrier_a2g = 2e9;             // Hz (also the UAV-UAV carrier)
    double carrier_mm = 28e9;             // Hz
    double noise_power = 3.9810717055349695e-21;  // W (-174 dBm)
    double pathloss_exponent = 2.0;       // n >= 2
    double env_c = 9.61;                  // LoS-probability environment constants
    double env_d = 0.16;
    double added_loss_los_db = 1.0;
    double added_loss_nlos_db = 20.0;
    double a2a_attenuation_db = 1.0;
    double uav_tx_antenna_gain_db = -10.0;
    int friis_exponent = 2;               // backhaul Friis term power, 1 or 2
};

/// Immutable world description. Safe to share across solver workers once
/// validated; nothing in the library mutates a scenario after construction.
struct NetworkScenario {
    std::vector<UserNode> users;
    std::vector<UavNode> uavs;
    BaseStation bs;
    RadioParams radio;
    std::uint64_t rng_seed = 0;

    /// Throws ValidationError on the first violated invariant.
    void validate() const;

    /// Indices of the users associated with UAV v.
    std::vector<int> users_of(int uav_id) const;
};

/// Table II defaults. Per-user and per-UAV quantities are ranges the
/// generator draws from uniformly; scalars are fixed.
struct ScenarioDefaults {
    double task_bits_min = 100.0 * 8e6;   // 100 MB
    double task_bits_max = 500.0 * 8e6;   // 500 MB
    double cycles_per_bit_min = 10.0;
    double cycles_per_bit_max = 50.0;
    double deadline_min_s = 0.5;
    double deadline_max_s = 3.0;
    double user_cpu_min = 0.5e6;
    double user_cpu_max = 3e6;
    double user_tx_power = dbm_to_watts(23.0);
    double user_energy_budget = 100e3;    // J
    double chip_constant = 5e-27;
    double uav_cpu_min = 1e6;
    double uav_cpu_max = 3.5e6;
    double uav_altitude_m = 50.0;
    double uav_tx_power_a2a = dbm_to_watts(30.0);
    double uav_tx_power_backhaul = dbm_to_watts(30.0);
    double uav_energy_budget = 500e3;     // J
    double bs_cpu_min = 2e6;
    double bs_cpu_max = 4e6;
    HoverParams hover;
    RadioParams radio;
};

/// Randomly deploys UAVs and users in a region_side_m x region_side_m square
/// with the BS at the origin. Users are associated to the nearest UAV by 3-D
/// distance. Deterministic for a fixed (seed, defaults).
NetworkScenario generate_random(int num_uavs, int num_users, double region_side_m,
                                std::uint64_t seed,
                                const ScenarioDefaults& defaults = ScenarioDefaults{});

/// JSON document round trip. save() writes every numeric field so that
/// load(save(s)) reproduces s bit-exactly.
NetworkScenario load_scenario(const std::string& path);
NetworkScenario scenario_from_json(const std::string& text);
void save_scenario(const NetworkScenario& scenario, const std::string& path);
std::string scenario_to_json(const NetworkScenario& scenario);

}  // namespace uavmec

#endif  // UAVMEC_SCENARIO_HPP_
