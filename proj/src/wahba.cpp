#include "icrb/wahba.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "icrb/parallel.hpp"

namespace icrb {
namespace {

void check_measurement_inputs(const Vec3& d, double sigma, const char* who) {
    if (d.norm() == 0.0) {
        throw std::invalid_argument(std::string(who) + ": zero reference direction");
    }
    if (sigma <= 0.0) {
        throw std::invalid_argument(std::string(who) + ": sigma must be positive");
    }
}

/// Second eigenvalue of the Gram sum of normalized directions; zero iff
/// the directions span less than a plane.
double direction_spread(const std::vector<VectorMeasurement>& ms) {
    Mat3 gram = Mat3::Zero();
    for (const VectorMeasurement& m : ms) {
        const Vec3 dn = m.d.normalized();
        gram += dn * dn.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(1); // ascending order
}

} // namespace

std::vector<VectorMeasurement> simulate_measurements(
    const Rotation& r, const std::vector<Reference>& refs, RngStream& rng) {
    std::vector<VectorMeasurement> out;
    out.reserve(refs.size());
    const Rotation r_inv = r.inverse();
    for (const Reference& ref : refs) {
        check_measurement_inputs(ref.d, ref.sigma, "simulate_measurements");
        const Vec3 w = rng.normal3(ref.sigma);
        out.push_back(VectorMeasurement{ref.d, r_inv * (ref.d + w), ref.sigma});
    }
    return out;
}

double wahba_cost(const Rotation& r,
                  const std::vector<VectorMeasurement>& measurements) {
    double cost = 0.0;
    const Rotation r_inv = r.inverse();
    for (const VectorMeasurement& m : measurements) {
        cost += 0.5 * (m.y - r_inv * m.d).squaredNorm() / (m.sigma * m.sigma);
    }
    return cost;
}

Rotation solve_wahba(const std::vector<VectorMeasurement>& measurements) {
    if (measurements.size() < 2) {
        throw UnobservableError(
            "solve_wahba: at least two vector measurements are required");
    }
    Mat3 b = Mat3::Zero();
    for (const VectorMeasurement& m : measurements) {
        check_measurement_inputs(m.d, m.sigma, "solve_wahba");
        b += (m.d * m.y.transpose()) / (m.sigma * m.sigma);
    }
    if (direction_spread(measurements) < 1e-10) {
        throw UnobservableError(
            "solve_wahba: reference directions are collinear; the rotation "
            "about their common axis is unobservable");
    }
    Eigen::JacobiSVD<Mat3> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double sign =
        (svd.matrixU().determinant() * svd.matrixV().determinant()) < 0.0 ? -1.0
                                                                          : 1.0;
    Mat3 d = Mat3::Identity();
    d(2, 2) = sign;
    return Rotation::from_matrix(svd.matrixU() * d * svd.matrixV().transpose());
}

Vec3 static_trial_error(const Rotation& r, const std::vector<Reference>& refs,
                        RngStream& rng) {
    const std::vector<VectorMeasurement> ms = simulate_measurements(r, refs, rng);
    const Rotation r_hat = solve_wahba(ms);
    return log_so3(r * r_hat.inverse());
}

StaticTrials run_static_trials(const Rotation& r,
                               const std::vector<Reference>& refs,
                               std::size_t n_trials, const RngStream& master,
                               unsigned jobs) {
    StaticTrials out;
    out.errors.assign(n_trials, Vec3::Zero());
    parallel_for(n_trials, jobs, [&](std::size_t i) {
        RngStream stream = master.split(i);
        out.errors[i] = static_trial_error(r, refs, stream);
    });
    const double reject_angle = std::numbers::pi - 1e-3;
    for (const Vec3& e : out.errors) {
        if (e.norm() >= reject_angle) {
            ++out.rejected;
        }
    }
    return out;
}

EmpiricalErrorCovariance empirical_error_covariance(
    const Rotation& r, const std::vector<Reference>& refs,
    std::size_t n_trials, const RngStream& master, unsigned jobs) {
    if (n_trials < 1000) {
        throw std::invalid_argument(
            "empirical_error_covariance: need at least 1000 trials");
    }
    const StaticTrials trials = run_static_trials(r, refs, n_trials, master, jobs);
    Mat3 p = Mat3::Zero();
    Vec3 bias = Vec3::Zero();
    for (const Vec3& e : trials.errors) { // fixed order: independent of jobs
        p += e * e.transpose();
        bias += e;
    }
    const double inv_n = 1.0 / static_cast<double>(n_trials);
    EmpiricalErrorCovariance out;
    out.p = CovMatrix{inv_n * p};
    out.bias = inv_n * bias;
    out.trial_count = n_trials;
    out.rejected_trials = trials.rejected;
    out.valid = static_cast<double>(trials.rejected) <=
                1e-3 * static_cast<double>(n_trials);
    return out;
}

} // namespace icrb
