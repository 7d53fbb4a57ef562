// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>

#include "json.hpp"

#include "faree/em_propagation.hpp"

namespace faree {

enum class UserRegionShape { disc, rectangle };

/// Area in the z = 0 plane where user reference points are dropped.
struct UserRegion {
    UserRegionShape shape = UserRegionShape::disc;
    Eigen::Vector2d center{0.0, 100.0};  // (x, y)
    double radius = 20.0;                // disc
    double width = 40.0;                 // rectangle extent along x
    double depth = 20.0;                 // rectangle extent along y
};

/// System constants. Powers are stored in watts; conversion from dBm happens at ingestion.
struct ScenarioConfig {
    int num_users = 4;
    int num_far_antennas = 4;
    int num_bs_antennas = 4;

    double bandwidth = 10e6;   // Hz
    double blockage_length = 10.0;
    double blockage_width = 0.3;
    double blockage_height = 5.0;
    double far_bs_distance = 50.0;  // Y0
    double region_size = 0.9;       // C
    double min_spacing = 0.15;      // d_min
    double pathloss_exponent = 2.6;
    double rician_k0 = 6.464101615137754;  // 3 + sqrt(12)
    double rician_k1 = 6.464101615137754;

    double noise_bs_density = 0.0;  // W/Hz, sigma_r^2 per Hz
    double noise_bs_fixed = 0.0;    // W; when > 0 overrides density * bandwidth
    double noise_faru = 0.0;   // W
    double max_power = 0.0;    // W
    double min_rate = 1e6;     // bit/s
    double power_bs = 0.0;     // W
    double power_far = 0.0;    // W
    double power_sris_element = 0.0;
    double power_afr_antenna = 0.0;

    MediumParams medium;  // carrier_wavelength doubles as the system wavelength
    UserRegion users;

    double gamma_shape = 2.0;
    double gamma_scale = 0.5;
    bool beta0_squared = false;  // mu_0^2 / D_0^l instead of mu_0 / D_0^l
    AttenuationModel attenuation = AttenuationModel::reference_distance;

    double sris_transmission = 0.9;  // power fraction
    double sris_reflection = 0.1;
    bool sris_random_phases = false;

    double wavelength() const { return medium.carrier_wavelength; }
    /// sigma_r^2 over the whole band, W.
    double noise_bs() const { return noise_bs_fixed > 0.0 ? noise_bs_fixed : noise_bs_density * bandwidth; }
    void validate() const;
};

/// Defaults of the reference scenario (K = M = N = 4, 10 MHz, 5 dBm budget).
ScenarioConfig table_one_config();

/// Scenario files use dBm for powers (keys ending in _dbm) and SI units elsewhere.
/// Missing keys keep the reference defaults. Unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j);
/// Canonical form (SI units, watts) used for hashing and run logs.
nlohmann::json config_to_json(const ScenarioConfig& config);

/// Stable 64-bit FNV-1a hash of the canonical JSON dump of a config.
std::string config_hash(const ScenarioConfig& config);

}  // namespace faree
