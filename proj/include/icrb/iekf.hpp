#pragma once

#include <functional>

#include <Eigen/Core>

#include "icrb/fisher.hpp"
#include "icrb/so3.hpp"

namespace icrb {

/// One measurement instant: two reference directions, their body-frame
/// observations, and per-direction noise levels.
struct MeasurementEpoch {
    double t_n = 0.0;
    Vec3 d0, d1;
    Vec3 y0, y1;
    double sigma0 = 0.0, sigma1 = 0.0;
};

/// Time-indexed angular velocity, fixed over the filter's current step.
using OmegaFn = std::function<Vec3(double)>;

/// 3x6 gain mapping the stacked fixed-frame innovation to a tangent correction.
using Gain = Eigen::Matrix<double, 3, 6>;

/// Stacked measurement matrix H = [hat(d0); hat(d1)].
Eigen::Matrix<double, 6, 3> stack_measurement_matrix(const Vec3& d0, const Vec3& d1);

/// Information contributed by one epoch's pair:
/// hat(d0)^T hat(d0) / sigma0^2 + hat(d1)^T hat(d1) / sigma1^2.
Mat3 epoch_information(const Vec3& d0, const Vec3& d1, double sigma0, double sigma1);

/**
 * @brief Invariant EKF state for attitude under deterministic dynamics.
 *
 * Carries the estimate, the covariance of the linearized right-invariant
 * error log(R Rhat^T), the accumulated measurement information (the
 * covariance is its inverse throughout, which is the content of the
 * trajectory-independence identity), and the current time. Only
 * initialize / propagate / update construct states, so every reachable
 * state is consistent.
 */
class IekfState {
public:
    const Rotation& r_hat() const { return r_hat_; }
    CovMatrix p() const { return CovMatrix{p_}; }
    InfoMatrix info_accum() const { return InfoMatrix{info_}; }
    double t() const { return t_; }

private:
    IekfState(const Rotation& r_hat, const Mat3& p, const Mat3& info, double t)
        : r_hat_(r_hat), p_(p), info_(info), t_(t) {}

    Rotation r_hat_;
    Mat3 p_;
    Mat3 info_;
    double t_;

    friend IekfState initialize(const MeasurementEpoch& epoch);
    friend IekfState propagate(const IekfState& state, const OmegaFn& omega,
                               double t_next);
    friend IekfState update(const IekfState& state, const MeasurementEpoch& epoch);
};

/**
 * @brief Maximum-likelihood start from the first epoch.
 *
 * Attitude from the two-vector Wahba solution; covariance in information
 * form, P_1 = epoch_information(...)^-1.
 *
 * @throws UnobservableError if the two directions are collinear.
 * @throws std::invalid_argument on zero directions or sigma <= 0.
 */
IekfState initialize(const MeasurementEpoch& epoch);

/**
 * @brief Integrate Rhat' = Rhat hat(omega(t)) from state.t() to @p t_next.
 *
 * Equal substeps of length <= 1e-3 s, omega evaluated at each substep's
 * midpoint, attitude advanced by the exact exponential. Exact when omega
 * is constant over [state.t(), t_next]; callers split at profile
 * breakpoints. Covariance and information are untouched (no process
 * noise). Renormalizes the attitude if drift exceeds kRenormalizeDefect.
 *
 * @throws std::invalid_argument if t_next < state.t().
 */
IekfState propagate(const IekfState& state, const OmegaFn& omega, double t_next);

/**
 * @brief Kalman gain for one epoch's stacked measurement.
 *
 * K = P H^T (H P H^T + N)^-1 with H = stack_measurement_matrix(d0, d1) and
 * N = blkdiag(sigma0^2 I, sigma1^2 I).
 *
 * @throws std::invalid_argument if a sigma is <= 0.
 */
Gain compute_gain(const CovMatrix& p, const Vec3& d0, const Vec3& d1,
                  double sigma0, double sigma1);

/**
 * @brief Measurement update at the epoch's time.
 *
 * Innovation z = [Rhat y0 - d0; Rhat y1 - d1], correction on the left:
 * Rhat+ = exp(K z) Rhat. Covariance in information form:
 * info+ = info + epoch_information(...), P+ = (info+)^-1.
 *
 * @throws std::invalid_argument if |state.t() - epoch.t_n| > 1e-9
 *         (propagate to the epoch first) or a sigma is <= 0.
 */
IekfState update(const IekfState& state, const MeasurementEpoch& epoch);

/**
 * @brief One step of the linearized error recursion:
 *        xi+ = (I - K H) xi + K v, v = [v0; v1] stacked fixed-frame noise.
 *
 * Reference model for the update's effect on the right-invariant error;
 * tests compare it against the exact group update at small errors.
 */
Vec3 linearized_error_step(const Vec3& xi, const Gain& k, const Vec3& d0,
                           const Vec3& d1, const Vec3& v0, const Vec3& v1);

} // namespace icrb
