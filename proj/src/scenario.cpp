#include "uavmec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace uavmec {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

}  // namespace

void NetworkScenario::validate() const {
    require(!uavs.empty(), "scenario has no UAVs");
    require(!users.empty(), "scenario has no users");
    for (std::size_t i = 0; i < uavs.size(); ++i) {
        const auto& v = uavs[i];
        require(v.id == static_cast<int>(i), "uav " + std::to_string(v.id) + ": ids must be contiguous from 0");
        require(v.altitude_m > 0, "uav " + std::to_string(v.id) + ": altitude must be > 0");
        require(v.cpu_capacity > 0, "uav " + std::to_string(v.id) + ": cpu_capacity must be > 0");
        require(v.energy_budget > 0, "uav " + std::to_string(v.id) + ": energy_budget must be > 0");
        require(v.tx_power_a2a > 0, "uav " + std::to_string(v.id) + ": tx_power_a2a must be > 0");
        require(v.tx_power_backhaul > 0, "uav " + std::to_string(v.id) + ": tx_power_backhaul must be > 0");
        const auto& h = v.hover;
        require(h.thrust_n > 0 && h.rotor_count > 0 && h.rotor_diameter_m > 0 && h.air_density > 0,
                "uav " + std::to_string(v.id) + ": hover parameters must be > 0");
        require(h.power_efficiency > 0 && h.power_efficiency <= 1.0,
                "uav " + std::to_string(v.id) + ": power_efficiency must be in (0,1]");
    }
    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& u = users[i];
        require(u.id == static_cast<int>(i), "user " + std::to_string(u.id) + ": ids must be contiguous from 0");
        require(u.local_cpu > 0, "user " + std::to_string(u.id) + ": local_cpu must be > 0");
        require(u.tx_power > 0, "user " + std::to_string(u.id) + ": tx_power must be > 0");
        require(u.energy_budget > 0, "user " + std::to_string(u.id) + ": energy_budget must be > 0");
        require(u.task.input_size_bits > 0, "user " + std::to_string(u.id) + ": input_size_bits must be > 0");
        require(u.task.cycles_per_bit > 0, "user " + std::to_string(u.id) + ": cycles_per_bit must be > 0");
        require(u.task.deadline_s > 0, "user " + std::to_string(u.id) + ": deadline must be > 0");
        require(u.home_uav >= 0 && u.home_uav < static_cast<int>(uavs.size()),
                "user " + std::to_string(u.id) + ": home_uav " + std::to_string(u.home_uav) +
                    " does not reference an existing UAV");
    }
    require(bs.cpu_capacity > 0, "base station cpu_capacity must be > 0");
    require(radio.a2g_bandwidth_per_uav > 0 && radio.a2a_bandwidth > 0 && radio.mmwave_bandwidth > 0,
            "all bandwidths must be > 0");
    require(radio.carrier_a2g > 0 && radio.carrier_mm > 0, "carrier frequencies must be > 0");
    require(radio.noise_power > 0, "noise_power must be > 0");
    require(radio.pathloss_exponent >= 2.0, "pathloss_exponent must be >= 2");
    require(radio.friis_exponent == 1 || radio.friis_exponent == 2, "friis_exponent must be 1 or 2");
}

std::vector<int> NetworkScenario::users_of(int uav_id) const {
    std::vector<int> out;
    for (const auto& u : users)
        if (u.home_uav == uav_id) out.push_back(u.id);
    return out;
}

NetworkScenario generate_random(int num_uavs, int num_users, double region_side_m,
                                std::uint64_t seed, const ScenarioDefaults& d) {
    if (num_uavs < 1) throw ValidationError("num_uavs must be >= 1");
    if (num_users < 1) throw ValidationError("num_users must be >= 1");
    if (!(region_side_m > 0)) throw ValidationError("region side must be > 0");

    std::mt19937_64 rng(seed);
    NetworkScenario s;
    s.rng_seed = seed;
    s.radio = d.radio;
    s.bs = BaseStation{0.0, 0.0, 0.0, 0.0, -50.0};

    s.uavs.reserve(num_uavs);
    for (int v = 0; v < num_uavs; ++v) {
        UavNode uav;
        uav.id = v;
        uav.x = uniform(rng, 0.0, region_side_m);
        uav.y = uniform(rng, 0.0, region_side_m);
        uav.altitude_m = d.uav_altitude_m;
        uav.cpu_capacity = uniform(rng, d.uav_cpu_min, d.uav_cpu_max);
        uav.tx_power_a2a = d.uav_tx_power_a2a;
        uav.tx_power_backhaul = d.uav_tx_power_backhaul;
        uav.energy_budget = d.uav_energy_budget;
        uav.chip_constant = d.chip_constant;
        uav.hover = d.hover;
        s.uavs.push_back(uav);
    }

    s.users.reserve(num_users);
    for (int u = 0; u < num_users; ++u) {
        UserNode user;
        user.id = u;
        user.x = uniform(rng, 0.0, region_side_m);
        user.y = uniform(rng, 0.0, region_side_m);
        user.local_cpu = uniform(rng, d.user_cpu_min, d.user_cpu_max);
        user.tx_power = d.user_tx_power;
        user.energy_budget = d.user_energy_budget;
        user.chip_constant = d.chip_constant;
        user.task.input_size_bits = uniform(rng, d.task_bits_min, d.task_bits_max);
        user.task.cycles_per_bit = uniform(rng, d.cycles_per_bit_min, d.cycles_per_bit_max);
        user.task.deadline_s = uniform(rng, d.deadline_min_s, d.deadline_max_s);

        // Association is predetermined by channel quality; with identical link
        // statistics that is the nearest UAV in 3-D distance.
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : s.uavs) {
            const double dx = v.x - user.x, dy = v.y - user.y;
            const double dist = std::sqrt(dx * dx + dy * dy + v.altitude_m * v.altitude_m);
            if (dist < best) {
                best = dist;
                user.home_uav = v.id;
            }
        }
        s.users.push_back(user);
    }

    s.bs.cpu_capacity = uniform(rng, d.bs_cpu_min, d.bs_cpu_max);
    s.validate();
    return s;
}

namespace {

using nlohmann::json;

json task_to_json(const TaskProfile& t) {
    return json{{"input_size_bits", t.input_size_bits},
                {"cycles_per_bit", t.cycles_per_bit},
                {"deadline_s", t.deadline_s}};
}

double get_num(const json& j, const std::string& ctx, const std::string& key) {
    if (!j.contains(key)) throw ParseError(ctx + ": missing field '" + key + "'");
    if (!j.at(key).is_number()) throw ParseError(ctx + ": field '" + key + "' is not a number");
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& ctx, const std::string& key) {
    if (!j.contains(key)) throw ParseError(ctx + ": missing field '" + key + "'");
    if (!j.at(key).is_number_integer()) throw ParseError(ctx + ": field '" + key + "' is not an integer");
    return j.at(key).get<int>();
}

}  // namespace

std::string scenario_to_json(const NetworkScenario& s) {
    json doc;
    doc["seed"] = s.rng_seed;
    doc["users"] = json::array();
    for (const auto& u : s.users) {
        doc["users"].push_back(json{{"id", u.id},
                                    {"x", u.x},
                                    {"y", u.y},
                                    {"local_cpu", u.local_cpu},
                                    {"tx_power", u.tx_power},
                                    {"energy_budget", u.energy_budget},
                                    {"chip_constant", u.chip_constant},
                                    {"task", task_to_json(u.task)},
                                    {"home_uav", u.home_uav}});
    }
    doc["uavs"] = json::array();
    for (const auto& v : s.uavs) {
        doc["uavs"].push_back(json{{"id", v.id},
                                   {"x", v.x},
                                   {"y", v.y},
                                   {"altitude_m", v.altitude_m},
                                   {"cpu_capacity", v.cpu_capacity},
                                   {"tx_power_a2a", v.tx_power_a2a},
                                   {"tx_power_backhaul", v.tx_power_backhaul},
                                   {"energy_budget", v.energy_budget},
                                   {"chip_constant", v.chip_constant},
                                   {"hover", json{{"thrust_n", v.hover.thrust_n},
                                                  {"power_efficiency", v.hover.power_efficiency},
                                                  {"rotor_count", v.hover.rotor_count},
                                                  {"rotor_diameter_m", v.hover.rotor_diameter_m},
                                                  {"air_density", v.hover.air_density}}}});
    }
    doc["bs"] = json{{"x", s.bs.x},
                     {"y", s.bs.y},
                     {"z", s.bs.z},
                     {"cpu_capacity", s.bs.cpu_capacity},
                     {"rx_antenna_gain_db", s.bs.rx_antenna_gain_db}};
    const auto& r = s.radio;
    doc["radio"] = json{{"a2g_bandwidth_per_uav", r.a2g_bandwidth_per_uav},
                        {"a2a_bandwidth", r.a2a_bandwidth},
                        {"mmwave_bandwidth", r.mmwave_bandwidth},
                        {"carrier_a2g", r.carrier_a2g},
                        {"carrier_mm", r.carrier_mm},
                        {"noise_power", r.noise_power},
                        {"pathloss_exponent", r.pathloss_exponent},
                        {"env_c", r.env_c},
                        {"env_d", r.env_d},
                        {"added_loss_los_db", r.added_loss_los_db},
                        {"added_loss_nlos_db", r.added_loss_nlos_db},
                        {"a2a_attenuation_db", r.a2a_attenuation_db},
                        {"uav_tx_antenna_gain_db", r.uav_tx_antenna_gain_db},
                        {"friis_exponent", r.friis_exponent}};
    return doc.dump(2);
}

NetworkScenario scenario_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario document is not valid JSON: ") + e.what());
    }
    NetworkScenario s;
    if (!doc.contains("users") || !doc.contains("uavs") || !doc.contains("bs") || !doc.contains("radio"))
        throw ParseError("scenario document must contain 'users', 'uavs', 'bs' and 'radio'");
    s.rng_seed = doc.value("seed", std::uint64_t{0});

    for (const auto& jv : doc.at("uavs")) {
        UavNode v;
        const std::string ctx = "uav " + std::to_string(s.uavs.size());
        v.id = get_int(jv, ctx, "id");
        v.x = get_num(jv, ctx, "x");
        v.y = get_num(jv, ctx, "y");
        v.altitude_m = get_num(jv, ctx, "altitude_m");
        v.cpu_capacity = get_num(jv, ctx, "cpu_capacity");
        v.tx_power_a2a = get_num(jv, ctx, "tx_power_a2a");
        v.tx_power_backhaul = get_num(jv, ctx, "tx_power_backhaul");
        v.energy_budget = get_num(jv, ctx, "energy_budget");
        v.chip_constant = get_num(jv, ctx, "chip_constant");
        if (!jv.contains("hover")) throw ParseError(ctx + ": missing field 'hover'");
        const auto& jh = jv.at("hover");
        v.hover.thrust_n = get_num(jh, ctx + ".hover", "thrust_n");
        v.hover.power_efficiency = get_num(jh, ctx + ".hover", "power_efficiency");
        v.hover.rotor_count = get_num(jh, ctx + ".hover", "rotor_count");
        v.hover.rotor_diameter_m = get_num(jh, ctx + ".hover", "rotor_diameter_m");
        v.hover.air_density = get_num(jh, ctx + ".hover", "air_density");
        s.uavs.push_back(v);
    }

    for (const auto& ju : doc.at("users")) {
        UserNode u;
        const std::string ctx = "user " + std::to_string(s.users.size());
        u.id = get_int(ju, ctx, "id");
        u.x = get_num(ju, ctx, "x");
        u.y = get_num(ju, ctx, "y");
        u.local_cpu = get_num(ju, ctx, "local_cpu");
        u.tx_power = get_num(ju, ctx, "tx_power");
        u.energy_budget = get_num(ju, ctx, "energy_budget");
        u.chip_constant = get_num(ju, ctx, "chip_constant");
        u.home_uav = get_int(ju, ctx, "home_uav");
        if (!ju.contains("task")) throw ParseError(ctx + ": missing field 'task'");
        const auto& jt = ju.at("task");
        u.task.input_size_bits = get_num(jt, ctx + ".task", "input_size_bits");
        u.task.cycles_per_bit = get_num(jt, ctx + ".task", "cycles_per_bit");
        u.task.deadline_s = get_num(jt, ctx + ".task", "deadline_s");
        s.users.push_back(u);
    }

    const auto& jb = doc.at("bs");
    s.bs.x = get_num(jb, "bs", "x");
    s.bs.y = get_num(jb, "bs", "y");
    s.bs.z = get_num(jb, "bs", "z");
    s.bs.cpu_capacity = get_num(jb, "bs", "cpu_capacity");
    s.bs.rx_antenna_gain_db = get_num(jb, "bs", "rx_antenna_gain_db");

    const auto& jr = doc.at("radio");
    s.radio.a2g_bandwidth_per_uav = get_num(jr, "radio", "a2g_bandwidth_per_uav");
    s.radio.a2a_bandwidth = get_num(jr, "radio", "a2a_bandwidth");
    s.radio.mmwave_bandwidth = get_num(jr, "radio", "mmwave_bandwidth");
    s.radio.carrier_a2g = get_num(jr, "radio", "carrier_a2g");
    s.radio.carrier_mm = get_num(jr, "radio", "carrier_mm");
    s.radio.noise_power = get_num(jr, "radio", "noise_power");
    s.radio.pathloss_exponent = get_num(jr, "radio", "pathloss_exponent");
    s.radio.env_c = get_num(jr, "radio", "env_c");
    s.radio.env_d = get_num(jr, "radio", "env_d");
    s.radio.added_loss_los_db = get_num(jr, "radio", "added_loss_los_db");
    s.radio.added_loss_nlos_db = get_num(jr, "radio", "added_loss_nlos_db");
    s.radio.a2a_attenuation_db = get_num(jr, "radio", "a2a_attenuation_db");
    s.radio.uav_tx_antenna_gain_db = get_num(jr, "radio", "uav_tx_antenna_gain_db");
    s.radio.friis_exponent = get_int(jr, "radio", "friis_exponent");

    s.validate();
    return s;
}

NetworkScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const NetworkScenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << scenario_to_json(s) << "\n";
}

}  // namespace uavmec
