#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "icrb/fisher.hpp"
#include "icrb/so3.hpp"

namespace icrb {

enum class ScenarioMode { static_wahba, dynamic_iekf };

/// Piecewise-constant angular velocity over [t_start, t_end).
struct OmegaSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    Vec3 omega = Vec3::Zero();
};

/// Declared measurement instant of a dynamic scenario (observations are
/// simulated at run time).
struct EpochSpec {
    double t_n = 0.0;
    Vec3 d0, d1;
    double sigma0 = 0.0, sigma1 = 0.0;
};

/**
 * @brief Complete, validated experiment description.
 *
 * Static mode uses refs; dynamic mode uses epochs and omega_profile. The
 * true attitude at t = 0 (or at the first epoch for dynamic runs) is
 * exp_so3(true_initial_attitude).
 */
struct Scenario {
    std::uint64_t seed = 0;
    ScenarioMode mode = ScenarioMode::static_wahba;
    std::vector<Reference> refs;
    std::vector<EpochSpec> epochs;
    std::vector<OmegaSegment> omega_profile;
    Vec3 true_initial_attitude = Vec3::Zero();
    std::size_t n_trials = 1;
};

/**
 * @brief Parse and validate a scenario from JSON.
 *
 * Fail-closed: unknown fields at any nesting level, missing required
 * fields, wrong types, non-increasing epoch times, gaps in the omega
 * profile, or non-positive sigmas all raise InvalidScenarioError.
 */
Scenario parse_scenario(const nlohmann::json& j);

/// parse_scenario() on the text of @p path.
/// @throws InvalidScenarioError on unreadable files or JSON syntax errors.
Scenario load_scenario(const std::string& path);

/// Inverse of parse_scenario (omits fields the mode does not use).
nlohmann::json scenario_to_json(const Scenario& s);

/// Structural validation used by parse_scenario; callable on hand-built
/// scenarios. @throws InvalidScenarioError.
void validate_scenario(const Scenario& s);

/**
 * @brief Angular velocity at time @p t from a piecewise profile.
 *
 * Segments are half-open [t_start, t_end); the final segment includes its
 * right endpoint. @throws InvalidScenarioError if @p t is outside the
 * profile's span.
 */
Vec3 omega_at(const std::vector<OmegaSegment>& profile, double t);

} // namespace icrb
