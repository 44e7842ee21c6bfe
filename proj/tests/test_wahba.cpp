#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <Eigen/LU>

#include "icrb/rng.hpp"
#include "icrb/wahba.hpp"

using namespace icrb;

namespace {

Rotation random_rotation(RngStream& rng, double max_angle = 2.5) {
    Vec3 v = rng.normal3(1.0);
    while (v.norm() < 1e-6) v = rng.normal3(1.0);
    return exp_so3(rng.uniform01() * max_angle * v.normalized());
}

std::vector<VectorMeasurement> noiseless(const Rotation& r,
                                         const std::vector<Reference>& refs) {
    std::vector<VectorMeasurement> out;
    out.reserve(refs.size());
    for (const auto& ref : refs) {
        out.push_back({ref.d, r.inverse() * ref.d, ref.sigma});
    }
    return out;
}

const std::vector<Reference> kTriad = {{Vec3(1, 0, 0), 0.05},
                                       {Vec3(0, 1, 0), 0.05},
                                       {Vec3(0, 0, 1), 0.05}};

} // namespace

TEST_CASE("simulate_measurements reduces to the exact model at tiny noise") {
    RngStream rng(301);
    const Rotation r = random_rotation(rng);
    const std::vector<Reference> refs = {{Vec3(1, 0, 0), 1e-12},
                                         {Vec3(0, 1, 0), 1e-12}};
    const auto ms = simulate_measurements(r, refs, rng);
    REQUIRE(ms.size() == 2);
    for (std::size_t k = 0; k < ms.size(); ++k) {
        CHECK((ms[k].y - r.inverse() * refs[k].d).norm() < 1e-10);
        CHECK(ms[k].sigma == refs[k].sigma);
        CHECK(ms[k].d == refs[k].d);
    }
}

TEST_CASE("simulate_measurements is deterministic and unbiased") {
    const Rotation r = exp_so3(Vec3(0.3, -0.5, 0.8));
    const std::vector<Reference> refs = {{Vec3(0.2, -1.0, 0.4), 0.1}};

    RngStream a(42), b(42);
    for (int i = 0; i < 20; ++i) {
        const auto ma = simulate_measurements(r, refs, a);
        const auto mb = simulate_measurements(r, refs, b);
        CHECK((ma[0].y - mb[0].y).cwiseAbs().maxCoeff() == 0.0);
    }

    RngStream rng(302);
    const int n = 100000;
    Vec3 mean = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
        mean += simulate_measurements(r, refs, rng)[0].y;
    }
    mean /= double(n);
    const Vec3 target = r.inverse() * refs[0].d;
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(mean[k] - target[k]) < 4.0 * refs[0].sigma / std::sqrt(double(n)));
    }

    CHECK_THROWS_AS(simulate_measurements(r, {{Vec3::Zero(), 0.1}}, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_measurements(r, {{Vec3(1, 0, 0), 0.0}}, rng),
                    std::invalid_argument);
}

TEST_CASE("solve_wahba recovers the attitude from exact measurements") {
    RngStream rng(303);
    for (int i = 0; i < 20; ++i) {
        const Rotation r = random_rotation(rng);
        const std::vector<Reference> refs = {{Vec3(1, 0, 0), 1.0}, {Vec3(0, 1, 0), 1.0}};
        const Rotation est = solve_wahba(noiseless(r, refs));
        CHECK(distance(est, r) < 1e-10);
    }
}

TEST_CASE("solve_wahba is continuous at the noiseless solution") {
    RngStream rng(304);
    const std::vector<Reference> refs = {{Vec3(1, 0, 0), 1e-6}, {Vec3(0, 1, 0), 1e-6}};
    const auto ms = simulate_measurements(Rotation::identity(), refs, rng);
    CHECK(distance(solve_wahba(ms), Rotation::identity()) < 1e-4);
}

TEST_CASE("solve_wahba beats a large random-candidate search") {
    RngStream rng(305);
    const Rotation r = random_rotation(rng);
    const auto ms = simulate_measurements(r, kTriad, rng);
    const Rotation est = solve_wahba(ms);
    const double best = wahba_cost(est, ms);

    RngStream search(306);
    double best_candidate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000000; ++i) {
        best_candidate = std::min(best_candidate,
                                  wahba_cost(random_rotation(search, 3.1), ms));
    }
    CHECK(best <= best_candidate + 1e-12);
}

TEST_CASE("solve_wahba applies the determinant correction") {
    // Antipodal second observation drives det(U V^T) negative; the
    // estimate must still be a proper rotation and the cost minimizer.
    std::vector<VectorMeasurement> ms = {{Vec3(1, 0, 0), Vec3(1, 0, 0), 1.0},
                                         {Vec3(0, 1, 0), Vec3(0, -1, 0), 1.0}};
    const Rotation est = solve_wahba(ms);
    CHECK(est.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));

    RngStream search(307);
    const double best = wahba_cost(est, ms);
    double best_candidate = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20000; ++i) {
        best_candidate = std::min(best_candidate,
                                  wahba_cost(random_rotation(search, 3.1), ms));
    }
    CHECK(best <= best_candidate + 1e-12);
}

TEST_CASE("solve_wahba rejects unobservable geometry") {
    CHECK_THROWS_AS(solve_wahba({{Vec3(0, 0, 1), Vec3(0, 0, 1), 1.0}}),
                    UnobservableError);
    CHECK_THROWS_AS(solve_wahba({{Vec3(0, 0, 1), Vec3(0, 0, 1), 1.0},
                                 {Vec3(0, 0, -2), Vec3(0, 0, -2), 1.0}}),
                    UnobservableError);
    CHECK_THROWS_AS(solve_wahba({}), UnobservableError);
}

TEST_CASE("solver error is equivariant in the true attitude") {
    // With the noise drawn in the fixed frame, the estimator error
    // Rhat(R) R^T is an exact function of the noise alone.
    RngStream rng(308);
    Mat3 baseline = Mat3::Zero();
    for (int i = 0; i < 10; ++i) {
        const Rotation r = (i == 0) ? Rotation::identity() : random_rotation(rng);
        RngStream noise(991);
        const auto ms = simulate_measurements(r, kTriad, noise);
        const Mat3 err = solve_wahba(ms).matrix() * r.matrix().transpose();
        if (i == 0) {
            baseline = err;
        } else {
            CHECK((err - baseline).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("static_trial_error shrinks with the noise") {
    RngStream rng(309);
    const Rotation r = random_rotation(rng);
    const std::vector<Reference> quiet = {{Vec3(1, 0, 0), 1e-8},
                                          {Vec3(0, 1, 0), 1e-8},
                                          {Vec3(0, 0, 1), 1e-8}};
    RngStream t1(11);
    CHECK(static_trial_error(r, quiet, t1).norm() < 1e-6);
}

TEST_CASE("run_static_trials is schedule independent") {
    const Rotation r = exp_so3(Vec3(0.2, 0.1, -0.3));
    const RngStream master(5150);
    const auto serial = run_static_trials(r, kTriad, 500, master, 1);
    const auto parallel = run_static_trials(r, kTriad, 500, master, 4);
    REQUIRE(serial.errors.size() == 500);
    REQUIRE(parallel.errors.size() == 500);
    for (std::size_t i = 0; i < serial.errors.size(); ++i) {
        CHECK((serial.errors[i] - parallel.errors[i]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(serial.rejected == parallel.rejected);
    CHECK(serial.rejected == 0);
}

TEST_CASE("empirical covariance vanishes in the small-noise limit") {
    const std::vector<Reference> quiet = {{Vec3(1, 0, 0), 1e-8},
                                          {Vec3(0, 1, 0), 1e-8},
                                          {Vec3(0, 0, 1), 1e-8}};
    const RngStream master(61);
    const auto est = empirical_error_covariance(Rotation::identity(), quiet, 1000, master);
    CHECK(est.p.p.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(est.valid);
}

TEST_CASE("empirical covariance approaches the first-order bound") {
    const RngStream master(62);
    const Rotation r = exp_so3(Vec3(-0.4, 0.25, 0.6));
    const auto est = empirical_error_covariance(r, kTriad, 10000, master, 2);

    const Mat3 jinv = invert_information(fisher_wahba(kTriad));
    const double ratio = est.p.p.trace() / jinv.trace();
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.15);
    CHECK(est.bias.norm() < 4.0 * std::sqrt(est.p.p.trace() / double(est.trial_count)));
    CHECK(est.trial_count == 10000);
    CHECK(est.rejected_trials == 0);
    CHECK(est.valid);

    // The empirical covariance dominates the curvature-corrected bound up
    // to the statistical tolerance.
    const Mat3 bound = icrlb(fisher_wahba(kTriad), est.p);
    CHECK(loewner_geq(est.p.p, bound, 5.0 * est.p.p.norm() / 100.0));
}

TEST_CASE("empirical covariance enforces its preconditions") {
    const RngStream master(63);
    CHECK_THROWS_AS(
        empirical_error_covariance(Rotation::identity(), kTriad, 10, master),
        std::invalid_argument);
    const std::vector<Reference> collinear = {{Vec3(0, 0, 1), 0.05},
                                              {Vec3(0, 0, 2), 0.05}};
    CHECK_THROWS_AS(
        empirical_error_covariance(Rotation::identity(), collinear, 1000, master),
        UnobservableError);
}
