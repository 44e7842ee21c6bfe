#pragma once

#include <Eigen/Core>

#include "icrb/errors.hpp"
#include "icrb/rng.hpp"

namespace icrb {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Domain margin for the principal logarithm: angles theta >= pi - kAngleNearPiMargin
/// are rejected with AngleNearPiError.
inline constexpr double kAngleNearPiMargin = 1e-6;

/// Below this angle, exp/log switch to series evaluation.
inline constexpr double kSmallAngle = 1e-4;

/// Orthogonality defect above which a rotation is renormalized during
/// long integrations.
inline constexpr double kRenormalizeDefect = 1e-9;

/**
 * @brief Proper rotation matrix (element of SO(3)).
 *
 * Construction through from_matrix() enforces R^T R = I to 1e-12 (max
 * absolute entry of R^T R - I) and det(R) > 0. Composition and inversion
 * preserve the invariant up to roundoff; renormalized() projects back onto
 * the group when drift accumulates.
 */
class Rotation {
public:
    /// Identity rotation.
    Rotation() : m_(Mat3::Identity()) {}

    static Rotation identity() { return Rotation(); }

    /**
     * @brief Checked constructor.
     * @throws std::invalid_argument if @p m is not orthogonal to 1e-12 or
     *         has non-positive determinant.
     */
    static Rotation from_matrix(const Mat3& m);

    const Mat3& matrix() const { return m_; }

    Rotation inverse() const { return Rotation(m_.transpose(), unchecked_t{}); }

    Rotation operator*(const Rotation& other) const {
        return Rotation(m_ * other.m_, unchecked_t{});
    }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }

    /// Max absolute entry of R^T R - I.
    double orthogonality_defect() const;

    /// Nearest rotation in Frobenius norm (polar projection via SVD).
    Rotation renormalized() const;

    bool is_approx(const Rotation& other, double tol = 1e-12) const {
        return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
    }

private:
    struct unchecked_t {};
    Rotation(const Mat3& m, unchecked_t) : m_(m) {}

    Mat3 m_;

    friend Rotation exp_so3(const Vec3& v);
};

/// Skew-symmetric matrix of @p v: hat(v) w = v x w.
Mat3 hat(const Vec3& v);

/**
 * @brief Inverse of hat().
 * @throws std::invalid_argument if @p s is not skew-symmetric to 1e-9
 *         (max absolute entry of S + S^T).
 */
Vec3 vee(const Mat3& s);

/// Exponential map (Rodrigues formula, series below kSmallAngle).
Rotation exp_so3(const Vec3& v);

/**
 * @brief Principal logarithm, returned as a tangent vector.
 *
 * Valid for rotation angles theta < pi - kAngleNearPiMargin.
 * @throws AngleNearPiError at or beyond the cut locus.
 */
Vec3 log_so3(const Rotation& r);

/// Bi-invariant distance ||log(r1 r2^T)||.
double distance(const Rotation& r1, const Rotation& r2);

/**
 * @brief Truncated inverse left Jacobian applied to a tangent vector:
 *        xi - (1/2) q x xi + (1/12) q x (q x xi).
 *
 * Second-order BCH truncation of d log; the omitted remainder is
 * O(||q||^4 ||xi||) (the cubic Bernoulli term vanishes). Intended for
 * ||q|| < pi - kAngleNearPiMargin.
 */
Vec3 dlog_bch(const Vec3& q, const Vec3& xi);

/**
 * @brief Draw xi ~ N(0, sigma^2 I_3) in the tangent space.
 * @throws std::invalid_argument if sigma <= 0.
 */
Vec3 sample_tangent_gaussian(double sigma, RngStream& rng);

} // namespace icrb
