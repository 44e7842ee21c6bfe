#pragma once

#include <cstddef>
#include <vector>

#include "icrb/so3.hpp"

namespace icrb {

/// One reference direction observed with isotropic Gaussian noise of
/// standard deviation sigma per axis.
struct Reference {
    Vec3 d;
    double sigma;
};

/// Fisher information for the attitude, expressed in the right-invariant
/// tangent parametrization. Symmetric positive semidefinite by construction.
struct InfoMatrix {
    Mat3 j;

    /// @throws std::invalid_argument unless @p m is symmetric (1e-12) with
    ///         eigenvalues >= -1e-12.
    static InfoMatrix from_matrix(const Mat3& m);
};

/// Covariance of the right-invariant attitude error log(R Rhat^T).
struct CovMatrix {
    Mat3 p;

    /// Same validation as InfoMatrix::from_matrix.
    static CovMatrix from_matrix(const Mat3& m);
};

/// Curvature correction operator R_m(P) = -(1/4) (P - Tr(P) I).
struct CurvatureTerm {
    Mat3 r;
};

/// Information contributed by a single reference direction:
/// (1/sigma^2) (||d||^2 I - d d^T) = (1/sigma^2) hat(d)^T hat(d).
InfoMatrix fisher_single_vector(const Vec3& d, double sigma);

/// Total information of a set of simultaneously observed references.
/// @throws std::invalid_argument on empty input or sigma <= 0.
InfoMatrix fisher_wahba(const std::vector<Reference>& refs);

/**
 * @brief Monte Carlo estimate of the Fisher information from score samples.
 *
 * Estimates E[s s^T] where s is the tangent-space score of one joint
 * observation of all references at attitude @p r. Off-diagonal entries come
 * from the polarization identity E[s_i s_j] = (E[(s_i+s_j)^2] - E[s_i^2]
 * - E[s_j^2]) / 2 so the estimate is symmetric by construction.
 *
 * Converges to fisher_wahba(refs).j at the 1/sqrt(n) rate; used as an
 * independent oracle for the closed form.
 *
 * @throws std::invalid_argument if n_samples < 10000.
 */
InfoMatrix fisher_score_oracle(const Rotation& r,
                               const std::vector<Reference>& refs,
                               std::size_t n_samples, RngStream& rng);

/// Symmetric inverse of an information matrix (eigendecomposition based).
/// @throws SingularInformationError if the smallest eigenvalue is <= 1e-12.
Mat3 invert_information(const InfoMatrix& j);

/**
 * @brief Intrinsic Cramer-Rao lower bound with curvature correction:
 *        J^-1 - (1/12) (C J^-1 + J^-1 C), C = Tr(P) I - P.
 *
 * @throws SingularInformationError if J is singular (smallest eigenvalue
 *         <= 1e-12).
 */
Mat3 icrlb(const InfoMatrix& j, const CovMatrix& p);

/// Squared form of the bound: M J^-1 M with M = (1 - Tr(P)/12) I + P/12.
/// Dominates icrlb(): squared - expanded = (1/144)(P - Tr(P) I) J^-1 (P - Tr(P) I).
Mat3 icrlb_squared_form(const InfoMatrix& j, const CovMatrix& p);

/// R_m(P) = -(1/4) (P - Tr(P) I).
CurvatureTerm curvature_operator(const CovMatrix& p);

/**
 * @brief Residual of the curvature-form reduction.
 *
 * Frobenius norm of the difference between the bound written through
 * R_m(P) (coefficients -1/12 and -1/144 after contraction) and the
 * expanded polynomial form. Zero in exact arithmetic; roundoff-sized on
 * well-scaled inputs.
 */
double smith_form_check(const InfoMatrix& j, const CovMatrix& p);

/// Loewner comparison: a >= b when the smallest eigenvalue of a - b is
/// >= -tol. Inputs are symmetrized before the eigensolve.
bool loewner_geq(const Mat3& a, const Mat3& b, double tol);

} // namespace icrb
