#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "icrb/iekf.hpp"
#include "icrb/runner.hpp"
#include "icrb/scenario.hpp"

namespace icrb {
namespace {

Rotation random_rotation(RngStream& rng) {
    return exp_so3(rng.normal3(1.0));
}

Mat3 random_spd(RngStream& rng, double lo, double hi) {
    const Rotation q = random_rotation(rng);
    Vec3 eig;
    for (int i = 0; i < 3; ++i) {
        eig(i) = lo + (hi - lo) * rng.uniform01();
    }
    return q.matrix() * eig.asDiagonal() * q.matrix().transpose();
}

Mat3 random_psd(RngStream& rng, double hi) {
    const Rotation q = random_rotation(rng);
    Vec3 eig;
    for (int i = 0; i < 3; ++i) {
        eig(i) = hi * rng.uniform01();
    }
    return q.matrix() * eig.asDiagonal() * q.matrix().transpose();
}

// Central finite difference of t -> log(exp(t xi) exp(q)) at t = 0,
// compared against the truncated series.
double fd_dlog_residual(const Vec3& q, const Vec3& xi) {
    const double t = 1e-6;
    const Rotation base = exp_so3(q);
    const Vec3 plus = log_so3(exp_so3(t * xi) * base);
    const Vec3 minus = log_so3(exp_so3(-t * xi) * base);
    const Vec3 fd = (plus - minus) / (2.0 * t);
    return (fd - dlog_bch(q, xi)).norm();
}

bool check(std::ostream& diag, bool ok, const std::string& line) {
    diag << (ok ? "[ ok ] " : "[fail] ") << line << "\n";
    return ok;
}

} // namespace

int run_verify(std::ostream& diag) {
    int failures = 0;
    const auto fmt = [](double x) {
        std::ostringstream os;
        os << std::setprecision(3) << std::scientific << x;
        return os.str();
    };

    // Curvature-form reduction residual over random well-scaled inputs.
    {
        RngStream rng(20240817);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const InfoMatrix j = InfoMatrix::from_matrix(random_spd(rng, 0.5, 3.0));
            const CovMatrix p = CovMatrix::from_matrix(random_psd(rng, 0.3));
            worst = std::max(worst, smith_form_check(j, p));
        }
        if (!check(diag, worst < 1e-12,
                   "smith_form_check: max residual " + fmt(worst) +
                       " over 100 random (J, P) pairs (tol 1e-12)")) {
            ++failures;
        }
    }

    // Truncated-dlog finite differences: the residual must be bounded by
    // C ||q||^3 and decay at least cubically under halving (the measured
    // decay is quartic, factor about 16, since the cubic series term
    // vanishes).
    {
        const Vec3 q_dir = Vec3(1.0, 0.7, -0.4).normalized();
        const Vec3 xi = Vec3(0.3, -1.0, 0.8).normalized();
        const double r_02 = fd_dlog_residual(0.2 * q_dir, xi);
        const double r_01 = fd_dlog_residual(0.1 * q_dir, xi);
        const double factor = r_02 / r_01;
        const double c = 1e-2;
        const bool ok = r_02 <= c * 0.2 * 0.2 * 0.2 && r_01 <= c * 0.1 * 0.1 * 0.1 &&
                        factor >= 6.0;
        if (!check(diag, ok,
                   "dlog_bch finite differences: residual " + fmt(r_02) +
                       " at ||q|| = 0.2, " + fmt(r_01) +
                       " at ||q|| = 0.1, decay factor " + fmt(factor) +
                       " (bound 1e-2 ||q||^3, factor >= 6)")) {
            ++failures;
        }
    }

    // Accumulated-information identity on a canned filtering scenario.
    {
        Scenario sc;
        sc.mode = ScenarioMode::dynamic_iekf;
        sc.seed = 7;
        sc.n_trials = 1;
        sc.true_initial_attitude = Vec3(0.4, -0.2, 0.9);
        const Vec3 d0 = Vec3(1.0, 0.1, 0.0).normalized();
        const Vec3 d1 = Vec3(-0.2, 1.0, 0.3).normalized();
        for (int k = 0; k < 12; ++k) {
            EpochSpec e;
            e.t_n = 0.5 * static_cast<double>(k);
            e.d0 = d0;
            e.d1 = d1;
            e.sigma0 = 0.04;
            e.sigma1 = 0.07;
            sc.epochs.push_back(e);
        }
        sc.omega_profile.push_back({0.0, 2.5, Vec3(0.3, -0.1, 0.6)});
        sc.omega_profile.push_back({2.5, 5.5, Vec3(-0.5, 0.2, 0.1)});

        const Report report = run_dynamic(sc, 1);
        Mat3 j_sum = Mat3::Zero();
        for (const EpochSpec& e : sc.epochs) {
            const Mat3 h0 = hat(e.d0);
            const Mat3 h1 = hat(e.d1);
            j_sum += h0.transpose() * h0 / (e.sigma0 * e.sigma0) +
                     h1.transpose() * h1 / (e.sigma1 * e.sigma1);
        }
        const Mat3 p_inv = invert_information(InfoMatrix{*report.iekf_p});
        const double rel = (p_inv - j_sum).norm() / j_sum.norm();
        if (!check(diag, rel < 1e-9,
                   "accumulated-information identity: relative error " + fmt(rel) +
                       " over 12 epochs (tol 1e-9)")) {
            ++failures;
        }
    }

    return failures;
}

} // namespace icrb
