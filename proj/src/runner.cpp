#include "icrb/runner.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "icrb/errors.hpp"
#include "icrb/iekf.hpp"
#include "icrb/parallel.hpp"
#include "icrb/wahba.hpp"

namespace icrb {
namespace {

constexpr double kRejectAngle = std::numbers::pi - 1e-3;

struct Moments {
    Mat3 p = Mat3::Zero();
    Vec3 bias = Vec3::Zero();
    std::size_t rejected = 0;
};

// Reduction in trial order, so the result is independent of how the trials
// were scheduled across threads.
Moments reduce(const std::vector<Vec3>& errors) {
    Moments m;
    for (const Vec3& e : errors) {
        m.p += e * e.transpose();
        m.bias += e;
        if (e.norm() >= kRejectAngle) {
            ++m.rejected;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(errors.size());
    m.p *= inv_n;
    m.bias *= inv_n;
    return m;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

// Advance a true attitude exactly through the piecewise-constant profile.
Rotation flow_true_attitude(const Rotation& r, const std::vector<OmegaSegment>& profile,
                            double t_from, double t_to) {
    Rotation out = r;
    double t = t_from;
    for (const OmegaSegment& seg : profile) {
        if (seg.t_end <= t || t >= t_to) {
            continue;
        }
        const double lo = std::max(t, seg.t_start);
        const double hi = std::min(t_to, seg.t_end);
        if (hi > lo) {
            out = out * exp_so3(seg.omega * (hi - lo));
            t = hi;
        }
    }
    if (t < t_to - 1e-9) {
        throw InvalidScenarioError("omega profile does not reach t = " +
                                   std::to_string(t_to));
    }
    return out;
}

// Filter propagation split at profile breakpoints, so each propagate call
// sees a constant omega.
IekfState propagate_through_profile(IekfState state,
                                    const std::vector<OmegaSegment>& profile,
                                    double t_to) {
    const OmegaFn omega = [&profile](double t) { return omega_at(profile, t); };
    for (const OmegaSegment& seg : profile) {
        if (seg.t_end <= state.t() || state.t() >= t_to) {
            continue;
        }
        const double hi = std::min(t_to, seg.t_end);
        if (hi > state.t()) {
            state = propagate(state, omega, hi);
        }
    }
    if (state.t() < t_to) {
        // Single-epoch scenarios may have no profile to walk.
        state = propagate(state, omega, t_to);
    }
    return state;
}

MeasurementEpoch simulate_epoch(const EpochSpec& spec, const Rotation& r_true,
                                RngStream& rng) {
    MeasurementEpoch e;
    e.t_n = spec.t_n;
    e.d0 = spec.d0;
    e.d1 = spec.d1;
    e.sigma0 = spec.sigma0;
    e.sigma1 = spec.sigma1;
    const Rotation r_inv = r_true.inverse();
    e.y0 = r_inv * (spec.d0 + rng.normal3(spec.sigma0));
    e.y1 = r_inv * (spec.d1 + rng.normal3(spec.sigma1));
    return e;
}

// One full dynamic trial; returns log(R_N Rhat_N^T) at the final epoch.
Vec3 dynamic_trial_error(const Scenario& sc, std::size_t trial,
                         const RngStream& master) {
    RngStream rng = master.split(trial);
    Rotation r_true = exp_so3(sc.true_initial_attitude);
    IekfState state = initialize(simulate_epoch(sc.epochs.front(), r_true, rng));
    for (std::size_t k = 1; k < sc.epochs.size(); ++k) {
        const double t_next = sc.epochs[k].t_n;
        r_true = flow_true_attitude(r_true, sc.omega_profile, sc.epochs[k - 1].t_n,
                                    t_next);
        state = propagate_through_profile(state, sc.omega_profile, t_next);
        state = update(state, simulate_epoch(sc.epochs[k], r_true, rng));
    }
    return log_so3(r_true * state.r_hat().inverse());
}

void fill_bounds(Report& report, const InfoMatrix& j) {
    report.bound_first_order = invert_information(j);
    report.bound_curvature = icrlb(j, CovMatrix{report.empirical_p});
    report.loewner_ok = loewner_geq(report.empirical_p, report.bound_curvature,
                                    loewner_tolerance(report.empirical_p,
                                                      report.trial_count));
}

} // namespace

double loewner_tolerance(const Mat3& empirical_p, std::size_t n_trials) {
    return 5.0 * empirical_p.norm() / std::sqrt(static_cast<double>(n_trials));
}

Report run_static(const Scenario& scenario, unsigned jobs,
                  std::vector<Vec3>* trial_errors) {
    if (scenario.mode != ScenarioMode::static_wahba) {
        throw InvalidScenarioError("run_static: scenario mode is not static_wahba");
    }
    validate_scenario(scenario);
    const auto start = std::chrono::steady_clock::now();
    const Rotation r_true = exp_so3(scenario.true_initial_attitude);
    const RngStream master(scenario.seed);
    const StaticTrials trials =
        run_static_trials(r_true, scenario.refs, scenario.n_trials, master, jobs);
    const Moments m = reduce(trials.errors);
    Report report;
    report.empirical_p = m.p;
    report.bias = m.bias;
    report.trial_count = scenario.n_trials;
    report.rejected_trials = m.rejected;
    fill_bounds(report, fisher_wahba(scenario.refs));
    report.timing = elapsed_seconds(start);
    if (trial_errors != nullptr) {
        *trial_errors = trials.errors;
    }
    return report;
}

Report run_dynamic(const Scenario& scenario, unsigned jobs,
                   std::vector<Vec3>* trial_errors) {
    if (scenario.mode != ScenarioMode::dynamic_iekf) {
        throw InvalidScenarioError("run_dynamic: scenario mode is not dynamic_iekf");
    }
    validate_scenario(scenario);
    const auto start = std::chrono::steady_clock::now();
    const RngStream master(scenario.seed);
    std::vector<Vec3> errors(scenario.n_trials, Vec3::Zero());
    parallel_for(scenario.n_trials, jobs, [&](std::size_t i) {
        errors[i] = dynamic_trial_error(scenario, i, master);
    });
    const Moments m = reduce(errors);

    const std::vector<Mat3> p_seq = iekf_covariance_sequence(scenario);
    const Mat3 iekf_p = p_seq.back();
    // Accumulated-information identity (the bound is computable online).
    Mat3 j_accum = Mat3::Zero();
    for (const EpochSpec& e : scenario.epochs) {
        const Mat3 h0 = hat(e.d0);
        const Mat3 h1 = hat(e.d1);
        j_accum += h0.transpose() * h0 / (e.sigma0 * e.sigma0) +
                   h1.transpose() * h1 / (e.sigma1 * e.sigma1);
    }
    const Mat3 p_inv = invert_information(InfoMatrix{iekf_p});
    const double rel = (p_inv - j_accum).norm() / j_accum.norm();
    if (!(rel < 1e-9)) {
        throw std::logic_error(
            "run_dynamic: accumulated-information identity violated, relative "
            "error " + std::to_string(rel));
    }

    Report report;
    report.empirical_p = m.p;
    report.iekf_p = iekf_p;
    report.bias = m.bias;
    report.trial_count = scenario.n_trials;
    report.rejected_trials = m.rejected;
    fill_bounds(report, InfoMatrix{j_accum});
    report.timing = elapsed_seconds(start);
    if (trial_errors != nullptr) {
        *trial_errors = errors;
    }
    return report;
}

std::vector<Mat3> iekf_covariance_sequence(const Scenario& scenario) {
    if (scenario.mode != ScenarioMode::dynamic_iekf) {
        throw InvalidScenarioError(
            "iekf_covariance_sequence: scenario mode is not dynamic_iekf");
    }
    validate_scenario(scenario);
    // The filter's covariance recursion, which never touches the
    // measurements: accumulate epoch information, invert after each epoch.
    std::vector<Mat3> out;
    out.reserve(scenario.epochs.size());
    Mat3 info = Mat3::Zero();
    for (const EpochSpec& e : scenario.epochs) {
        info += epoch_information(e.d0, e.d1, e.sigma0, e.sigma1);
        out.push_back(invert_information(InfoMatrix{info}));
    }
    return out;
}

InfoMatrix scenario_information(const Scenario& scenario) {
    validate_scenario(scenario);
    if (scenario.mode == ScenarioMode::static_wahba) {
        return fisher_wahba(scenario.refs);
    }
    Mat3 j = Mat3::Zero();
    for (const EpochSpec& e : scenario.epochs) {
        j += epoch_information(e.d0, e.d1, e.sigma0, e.sigma1);
    }
    return InfoMatrix{j};
}

void write_trials_csv(std::ostream& os, const std::vector<Vec3>& errors) {
    os << "trial,xi_x,xi_y,xi_z,angle\n";
    os.precision(17);
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const Vec3& e = errors[i];
        os << i << ',' << e.x() << ',' << e.y() << ',' << e.z() << ','
           << e.norm() << '\n';
    }
}

} // namespace icrb
