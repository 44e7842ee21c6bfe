#pragma once

#include <cstddef>
#include <vector>

#include "icrb/fisher.hpp"
#include "icrb/so3.hpp"

namespace icrb {

/// Reference direction d (fixed frame), its body-frame observation y, and
/// the per-axis noise level of that observation.
struct VectorMeasurement {
    Vec3 d;
    Vec3 y;
    double sigma;
};

/**
 * @brief Draw one joint observation of all references at attitude @p r.
 *
 * y_k = r^T (d_k + w_k) with w_k ~ N(0, sigma_k^2 I_3) drawn in the fixed
 * frame (distributionally identical to body-frame isotropic noise, and
 * independent of r for a fixed stream state).
 */
std::vector<VectorMeasurement> simulate_measurements(
    const Rotation& r, const std::vector<Reference>& refs, RngStream& rng);

/// Weighted Wahba cost (1/2) sum (1/sigma_k^2) ||y_k - r^T d_k||^2.
double wahba_cost(const Rotation& r,
                  const std::vector<VectorMeasurement>& measurements);

/**
 * @brief Global minimizer of the weighted Wahba cost.
 *
 * SVD solution with determinant correction: B = sum (1/sigma_k^2) d_k y_k^T,
 * B = U S V^T, Rhat = U diag(1, 1, det(U) det(V)) V^T.
 *
 * @throws UnobservableError with fewer than two measurements or when the
 *         normalized reference directions are collinear (second eigenvalue
 *         of the direction Gram sum below 1e-10).
 * @throws std::invalid_argument on zero reference directions or sigma <= 0.
 */
Rotation solve_wahba(const std::vector<VectorMeasurement>& measurements);

/// One simulate-solve round trip; returns the intrinsic error log(r rhat^T).
/// @throws AngleNearPiError if the error angle reaches the cut locus.
Vec3 static_trial_error(const Rotation& r, const std::vector<Reference>& refs,
                        RngStream& rng);

/// Raw output of a batch of static trials, in trial order.
struct StaticTrials {
    std::vector<Vec3> errors;   ///< log(r rhat^T), one per trial
    std::size_t rejected = 0;   ///< trials with error angle >= pi - 1e-3
};

/**
 * @brief Run @p n_trials independent simulate-solve trials.
 *
 * Trial i consumes master.split(i); results are stored per trial and
 * reduced in index order, so the output is byte-identical for any @p jobs.
 */
StaticTrials run_static_trials(const Rotation& r,
                               const std::vector<Reference>& refs,
                               std::size_t n_trials, const RngStream& master,
                               unsigned jobs = 1);

struct EmpiricalErrorCovariance {
    CovMatrix p;                    ///< (1/n) sum xi xi^T
    Vec3 bias;                      ///< (1/n) sum xi
    std::size_t trial_count = 0;
    std::size_t rejected_trials = 0;
    bool valid = false;             ///< rejected_trials / trial_count <= 1e-3
};

/**
 * @brief Monte Carlo estimate of the solver's intrinsic error covariance.
 *
 * Rejected trials (error angle >= pi - 1e-3) are counted but still
 * included in the moments; validity only flags their fraction.
 *
 * @throws std::invalid_argument if n_trials < 1000.
 * @throws UnobservableError if the reference geometry cannot determine
 *         the attitude.
 */
EmpiricalErrorCovariance empirical_error_covariance(
    const Rotation& r, const std::vector<Reference>& refs,
    std::size_t n_trials, const RngStream& master, unsigned jobs = 1);

} // namespace icrb
