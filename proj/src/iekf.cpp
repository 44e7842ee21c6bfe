#include "icrb/iekf.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "icrb/wahba.hpp"

namespace icrb {
namespace {

constexpr double kMaxStep = 1e-3;     // seconds
constexpr double kEpochTimeTol = 1e-9;

void check_sigmas(double sigma0, double sigma1, const char* who) {
    if (sigma0 <= 0.0 || sigma1 <= 0.0) {
        throw std::invalid_argument(std::string(who) + ": sigmas must be positive");
    }
}

} // namespace

Eigen::Matrix<double, 6, 3> stack_measurement_matrix(const Vec3& d0, const Vec3& d1) {
    Eigen::Matrix<double, 6, 3> h;
    h.topRows<3>() = hat(d0);
    h.bottomRows<3>() = hat(d1);
    return h;
}

Mat3 epoch_information(const Vec3& d0, const Vec3& d1, double sigma0, double sigma1) {
    check_sigmas(sigma0, sigma1, "epoch_information");
    const Mat3 h0 = hat(d0);
    const Mat3 h1 = hat(d1);
    return h0.transpose() * h0 / (sigma0 * sigma0) +
           h1.transpose() * h1 / (sigma1 * sigma1);
}

IekfState initialize(const MeasurementEpoch& epoch) {
    check_sigmas(epoch.sigma0, epoch.sigma1, "initialize");
    // Maximum-likelihood start: Wahba on the two weighted pairs.
    const std::vector<VectorMeasurement> pairs = {
        {epoch.d0, epoch.y0, epoch.sigma0},
        {epoch.d1, epoch.y1, epoch.sigma1},
    };
    const Rotation r_hat = solve_wahba(pairs);
    const Mat3 info = epoch_information(epoch.d0, epoch.d1, epoch.sigma0, epoch.sigma1);
    const Mat3 p = invert_information(InfoMatrix{info});
    return IekfState(r_hat, p, info, epoch.t_n);
}

IekfState propagate(const IekfState& state, const OmegaFn& omega, double t_next) {
    if (t_next < state.t()) {
        throw std::invalid_argument("propagate: t_next precedes the state time");
    }
    const double dt = t_next - state.t();
    if (dt == 0.0) {
        return state;
    }
    const auto n_steps = static_cast<std::size_t>(std::ceil(dt / kMaxStep));
    const double h = dt / static_cast<double>(n_steps);
    Rotation r = state.r_hat();
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t_mid = state.t() + (static_cast<double>(k) + 0.5) * h;
        r = r * exp_so3(omega(t_mid) * h);
    }
    if (r.orthogonality_defect() > kRenormalizeDefect) {
        r = r.renormalized();
    }
    // No process noise: the linearized error is static between epochs.
    return IekfState(r, state.p_, state.info_, t_next);
}

Gain compute_gain(const CovMatrix& p, const Vec3& d0, const Vec3& d1,
                  double sigma0, double sigma1) {
    check_sigmas(sigma0, sigma1, "compute_gain");
    const Eigen::Matrix<double, 6, 3> h = stack_measurement_matrix(d0, d1);
    Eigen::Matrix<double, 6, 6> s = h * p.p * h.transpose();
    s.topLeftCorner<3, 3>() += sigma0 * sigma0 * Mat3::Identity();
    s.bottomRightCorner<3, 3>() += sigma1 * sigma1 * Mat3::Identity();
    // K = P H^T S^-1, via the SPD solve S K^T = H P.
    const Eigen::Matrix<double, 6, 3> kt = s.llt().solve(h * p.p);
    return kt.transpose();
}

IekfState update(const IekfState& state, const MeasurementEpoch& epoch) {
    check_sigmas(epoch.sigma0, epoch.sigma1, "update");
    if (std::abs(state.t() - epoch.t_n) > kEpochTimeTol) {
        throw std::invalid_argument(
            "update: state is at t = " + std::to_string(state.t()) +
            ", epoch at t_n = " + std::to_string(epoch.t_n) +
            "; propagate to the epoch first");
    }
    const Gain k = compute_gain(state.p(), epoch.d0, epoch.d1,
                                epoch.sigma0, epoch.sigma1);
    Eigen::Matrix<double, 6, 1> z;
    z.head<3>() = state.r_hat() * epoch.y0 - epoch.d0;
    z.tail<3>() = state.r_hat() * epoch.y1 - epoch.d1;
    const Rotation r_hat = exp_so3(k * z) * state.r_hat();
    const Mat3 info = state.info_ + epoch_information(epoch.d0, epoch.d1,
                                                      epoch.sigma0, epoch.sigma1);
    const Mat3 p = invert_information(InfoMatrix{info});
    return IekfState(r_hat, p, info, state.t());
}

Vec3 linearized_error_step(const Vec3& xi, const Gain& k, const Vec3& d0,
                           const Vec3& d1, const Vec3& v0, const Vec3& v1) {
    const Eigen::Matrix<double, 6, 3> h = stack_measurement_matrix(d0, d1);
    Eigen::Matrix<double, 6, 1> v;
    v.head<3>() = v0;
    v.tail<3>() = v1;
    return (Mat3::Identity() - k * h) * xi + k * v;
}

} // namespace icrb
