#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "icrb/so3.hpp"

namespace icrb {

/**
 * @brief Result of one Monte Carlo run, static or dynamic.
 *
 * Matrices are the empirical error covariance, the first-order bound
 * (J^-1), and the curvature-corrected bound evaluated at the empirical
 * covariance. iekf_p is the filter's own final covariance (dynamic runs
 * only; serialized as null otherwise). timing is wall-clock seconds; it is
 * zeroed in canonical (deterministic) serializations.
 */
struct Report {
    Mat3 empirical_p = Mat3::Zero();
    Mat3 bound_first_order = Mat3::Zero();
    Mat3 bound_curvature = Mat3::Zero();
    std::optional<Mat3> iekf_p;
    Vec3 bias = Vec3::Zero();
    std::size_t trial_count = 0;
    std::size_t rejected_trials = 0;
    bool loewner_ok = false;
    double timing = 0.0;
};

/// Exact equality of the run content; timing is metadata and not compared.
bool operator==(const Report& a, const Report& b);

nlohmann::json report_to_json(const Report& r);

/// @throws InvalidScenarioError on missing fields or wrong shapes.
Report report_from_json(const nlohmann::json& j);

/// Canonical text form: timing forced to 0.0, two-space indent, newline
/// terminated. Byte-identical for identical runs regardless of wall time.
std::string report_to_canonical_string(const Report& r);

} // namespace icrb
