// SPDX-License-Identifier: Apache-2.0
#include "faree/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "faree/units.hpp"

namespace faree {

using nlohmann::json;

void ScenarioConfig::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid scenario: ") + what);
    };
    medium.validate();
    need(num_users >= 1 && num_far_antennas >= 1 && num_bs_antennas >= 1, "antenna and user counts must be >= 1");
    need(bandwidth > 0.0, "bandwidth must be > 0");
    need(blockage_length > 0.0 && blockage_width > 0.0 && blockage_height > 0.0, "blockage dimensions must be > 0");
    need(far_bs_distance > 0.0, "Y0 must be > 0");
    need(region_size >= 0.0, "region size must be >= 0");
    need(region_size <= std::min(blockage_length, blockage_height), "region size must fit the blockage face");
    need(min_spacing > 0.0, "min spacing must be > 0");
    need(pathloss_exponent >= 2.0 && pathloss_exponent <= 6.0, "pathloss exponent must lie in [2, 6]");
    need(rician_k0 >= 0.0 && rician_k1 >= 0.0, "Rician factors must be >= 0");
    need(noise_bs() > 0.0, "BS noise must be > 0");
    need(noise_faru >= 0.0, "FAR-U noise must be >= 0");
    need(max_power > 0.0, "max power must be > 0");
    need(min_rate >= 0.0, "min rate must be >= 0");
    need(power_bs >= 0.0 && power_far >= 0.0 && power_sris_element >= 0.0 && power_afr_antenna >= 0.0,
         "circuit powers must be >= 0");
    need(gamma_shape > 0.0 && gamma_scale > 0.0, "gamma parameters must be > 0");
    need(sris_transmission >= 0.0 && sris_reflection >= 0.0 && sris_transmission + sris_reflection <= 1.0 + 1e-12,
         "STAR-RIS coefficients must satisfy t + r <= 1");
    need(users.radius >= 0.0 && users.width >= 0.0 && users.depth >= 0.0, "user region extents must be >= 0");
    // More than one antenna per region needs room for the spacing grid.
    auto grid_fits = [&](int n) {
        if (n <= 1) return true;
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
        return (cols - 1) * min_spacing <= region_size + 1e-12;
    };
    need(grid_fits(num_far_antennas) && grid_fits(num_bs_antennas), "region too small for a d_min-spaced grid");
}

ScenarioConfig table_one_config() {
    ScenarioConfig c;
    c.noise_bs_density = dbm_to_watt(-174.0);
    c.noise_faru = dbm_to_watt(-90.0);
    c.max_power = dbm_to_watt(5.0);
    c.power_bs = dbm_to_watt(39.0);
    c.power_far = dbm_to_watt(30.0);
    c.power_sris_element = dbm_to_watt(5.0);
    c.power_afr_antenna = dbm_to_watt(20.0);
    c.min_spacing = c.wavelength() / 2.0;
    c.region_size = 3.0 * c.wavelength();
    return c;
}

namespace {

const char* attenuation_name(AttenuationModel m) {
    return m == AttenuationModel::per_pair ? "per_pair" : "reference_distance";
}

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void take_dbm(const json& j, const char* key, double& dst_watt) {
    if (j.contains(key)) dst_watt = dbm_to_watt(j.at(key).get<double>());
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
    static const std::set<std::string> known = {
        "num_users", "num_far_antennas", "num_bs_antennas", "bandwidth", "blockage_length", "blockage_width",
        "blockage_height", "far_bs_distance", "region_size", "min_spacing", "pathloss_exponent", "rician_k0",
        "rician_k1", "noise_bs_dbm_per_hz", "noise_bs_dbm", "noise_faru_dbm", "max_power_dbm", "min_rate",
        "power_bs_dbm", "power_far_dbm", "power_sris_element_dbm", "power_afr_antenna_dbm", "conductivity",
        "relative_permittivity", "relative_permeability", "wavelength", "user_region", "gamma_shape",
        "gamma_scale", "beta0_squared", "attenuation", "sris_transmission", "sris_reflection",
        "sris_random_phases"};
    if (!j.is_object()) throw std::invalid_argument("scenario config must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) throw std::invalid_argument("unknown scenario key: " + item.key());
    }

    ScenarioConfig c = table_one_config();
    take(j, "num_users", c.num_users);
    take(j, "num_far_antennas", c.num_far_antennas);
    take(j, "num_bs_antennas", c.num_bs_antennas);
    take(j, "bandwidth", c.bandwidth);
    take(j, "blockage_length", c.blockage_length);
    take(j, "blockage_width", c.blockage_width);
    take(j, "blockage_height", c.blockage_height);
    take(j, "far_bs_distance", c.far_bs_distance);
    take(j, "wavelength", c.medium.carrier_wavelength);
    // Spacing and region size track the wavelength unless given explicitly.
    c.min_spacing = c.wavelength() / 2.0;
    c.region_size = 3.0 * c.wavelength();
    take(j, "region_size", c.region_size);
    take(j, "min_spacing", c.min_spacing);
    take(j, "pathloss_exponent", c.pathloss_exponent);
    take(j, "rician_k0", c.rician_k0);
    take(j, "rician_k1", c.rician_k1);
    if (j.contains("noise_bs_dbm_per_hz")) c.noise_bs_density = dbm_to_watt(j.at("noise_bs_dbm_per_hz").get<double>());
    take_dbm(j, "noise_bs_dbm", c.noise_bs_fixed);
    take_dbm(j, "noise_faru_dbm", c.noise_faru);
    take_dbm(j, "max_power_dbm", c.max_power);
    take(j, "min_rate", c.min_rate);
    take_dbm(j, "power_bs_dbm", c.power_bs);
    take_dbm(j, "power_far_dbm", c.power_far);
    take_dbm(j, "power_sris_element_dbm", c.power_sris_element);
    take_dbm(j, "power_afr_antenna_dbm", c.power_afr_antenna);
    take(j, "conductivity", c.medium.conductivity);
    take(j, "relative_permittivity", c.medium.relative_permittivity);
    take(j, "relative_permeability", c.medium.relative_permeability);
    if (j.contains("user_region")) {
        const json& u = j.at("user_region");
        std::string shape = u.value("shape", std::string("disc"));
        if (shape == "disc") {
            c.users.shape = UserRegionShape::disc;
        } else if (shape == "rectangle") {
            c.users.shape = UserRegionShape::rectangle;
        } else {
            throw std::invalid_argument("user_region.shape must be disc or rectangle");
        }
        if (u.contains("center")) {
            auto v = u.at("center").get<std::vector<double>>();
            if (v.size() != 2) throw std::invalid_argument("user_region.center needs two entries");
            c.users.center = {v[0], v[1]};
        }
        take(u, "radius", c.users.radius);
        take(u, "width", c.users.width);
        take(u, "depth", c.users.depth);
    }
    take(j, "gamma_shape", c.gamma_shape);
    take(j, "gamma_scale", c.gamma_scale);
    take(j, "beta0_squared", c.beta0_squared);
    if (j.contains("attenuation")) {
        auto a = j.at("attenuation").get<std::string>();
        if (a == "per_pair") {
            c.attenuation = AttenuationModel::per_pair;
        } else if (a == "reference_distance") {
            c.attenuation = AttenuationModel::reference_distance;
        } else {
            throw std::invalid_argument("attenuation must be reference_distance or per_pair");
        }
    }
    take(j, "sris_transmission", c.sris_transmission);
    take(j, "sris_reflection", c.sris_reflection);
    take(j, "sris_random_phases", c.sris_random_phases);
    c.validate();
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json u = {{"shape", c.users.shape == UserRegionShape::disc ? "disc" : "rectangle"},
              {"center", {c.users.center(0), c.users.center(1)}},
              {"radius", c.users.radius},
              {"width", c.users.width},
              {"depth", c.users.depth}};
    // nlohmann::json sorts object keys, which keeps the dump canonical.
    return json{{"num_users", c.num_users},
                {"num_far_antennas", c.num_far_antennas},
                {"num_bs_antennas", c.num_bs_antennas},
                {"bandwidth", c.bandwidth},
                {"blockage_length", c.blockage_length},
                {"blockage_width", c.blockage_width},
                {"blockage_height", c.blockage_height},
                {"far_bs_distance", c.far_bs_distance},
                {"region_size", c.region_size},
                {"min_spacing", c.min_spacing},
                {"pathloss_exponent", c.pathloss_exponent},
                {"rician_k0", c.rician_k0},
                {"rician_k1", c.rician_k1},
                {"noise_bs_w", c.noise_bs()},
                {"noise_faru_w", c.noise_faru},
                {"max_power_w", c.max_power},
                {"min_rate", c.min_rate},
                {"power_bs_w", c.power_bs},
                {"power_far_w", c.power_far},
                {"power_sris_element_w", c.power_sris_element},
                {"power_afr_antenna_w", c.power_afr_antenna},
                {"conductivity", c.medium.conductivity},
                {"relative_permittivity", c.medium.relative_permittivity},
                {"relative_permeability", c.medium.relative_permeability},
                {"wavelength", c.medium.carrier_wavelength},
                {"user_region", u},
                {"gamma_shape", c.gamma_shape},
                {"gamma_scale", c.gamma_scale},
                {"beta0_squared", c.beta0_squared},
                {"attenuation", attenuation_name(c.attenuation)},
                {"sris_transmission", c.sris_transmission},
                {"sris_reflection", c.sris_reflection},
                {"sris_random_phases", c.sris_random_phases}};
}

std::string config_hash(const ScenarioConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace faree
