#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "icrb/report.hpp"
#include "icrb/scenario.hpp"

namespace icrb {

/**
 * @brief Full static-mode Monte Carlo run.
 *
 * Per-trial simulate + solve_wahba, errors reduced in trial order
 * (byte-identical across jobs). bound_curvature uses the run's own
 * empirical covariance; loewner_ok compares empirical_p against it with
 * the statistical tolerance 5 ||P_hat||_F / sqrt(n_trials).
 *
 * @param trial_errors optional sink for the per-trial error vectors.
 * @throws InvalidScenarioError if the scenario is not static mode.
 */
Report run_static(const Scenario& scenario, unsigned jobs = 1,
                  std::vector<Vec3>* trial_errors = nullptr);

/**
 * @brief Full dynamic-mode Monte Carlo run.
 *
 * Each trial integrates the true attitude and the filter through the
 * epoch schedule, then records log(R_N Rhat_N^T). iekf_p is the filter's
 * final covariance (trial-independent). The accumulated-information
 * identity P_N^-1 = sum_k H_k^T N_k^-1 H_k is asserted to 1e-9 relative
 * Frobenius error on every run.
 *
 * @throws InvalidScenarioError if the scenario is not dynamic mode.
 * @throws std::logic_error if the identity check fails.
 */
Report run_dynamic(const Scenario& scenario, unsigned jobs = 1,
                   std::vector<Vec3>* trial_errors = nullptr);

/// Per-epoch filter covariances P_1..P_N of a dynamic scenario. Pure
/// function of the epoch directions, sigmas, and order; no simulation.
std::vector<Mat3> iekf_covariance_sequence(const Scenario& scenario);

/// Fisher information of the scenario's measurement set: fisher_wahba for
/// static mode, the accumulated epoch information for dynamic mode.
InfoMatrix scenario_information(const Scenario& scenario);

/// Statistical Loewner tolerance used by the runners.
double loewner_tolerance(const Mat3& empirical_p, std::size_t n_trials);

/// CSV dump of per-trial errors: header trial,xi_x,xi_y,xi_z,angle.
void write_trials_csv(std::ostream& os, const std::vector<Vec3>& errors);

/**
 * @brief Built-in self checks (the CLI's verify subcommand).
 *
 * Runs the curvature-form reduction residual over random inputs, the
 * finite-difference decay of the dlog truncation error, and the
 * accumulated-information identity on a canned scenario. Prints one line
 * per check to @p diag.
 *
 * @return number of failed checks (0 on success).
 */
int run_verify(std::ostream& diag);

} // namespace icrb
