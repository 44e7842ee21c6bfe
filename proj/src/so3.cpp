#include "icrb/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace icrb {

Rotation Rotation::from_matrix(const Mat3& m) {
    const double defect = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (defect > 1e-12) {
        throw std::invalid_argument("Rotation::from_matrix: orthogonality defect " +
                                    std::to_string(defect));
    }
    if (m.determinant() <= 0.0) {
        throw std::invalid_argument("Rotation::from_matrix: non-positive determinant");
    }
    return Rotation(m, unchecked_t{});
}

double Rotation::orthogonality_defect() const {
    return (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Rotation Rotation::renormalized() const {
    Eigen::JacobiSVD<Mat3> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        // Cannot happen for drift-sized perturbations of a rotation, but
        // keep the projection proper regardless.
        Mat3 d = Mat3::Identity();
        d(2, 2) = -1.0;
        r = svd.matrixU() * d * svd.matrixV().transpose();
    }
    return Rotation(r, unchecked_t{});
}

Mat3 hat(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

Vec3 vee(const Mat3& s) {
    const double defect = (s + s.transpose()).cwiseAbs().maxCoeff();
    if (defect >= 1e-9) {
        throw std::invalid_argument("vee: input is not skew-symmetric, defect " +
                                    std::to_string(defect));
    }
    // Averaging the mirrored entries makes vee(hat(v)) == v exact.
    return Vec3(0.5 * (s(2, 1) - s(1, 2)),
                0.5 * (s(0, 2) - s(2, 0)),
                0.5 * (s(1, 0) - s(0, 1)));
}

Rotation exp_so3(const Vec3& v) {
    const double theta2 = v.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a, b; // R = I + a hat(v) + b hat(v)^2
    if (theta < kSmallAngle) {
        a = 1.0 - theta2 / 6.0 * (1.0 - theta2 / 20.0);
        b = 0.5 - theta2 / 24.0 * (1.0 - theta2 / 30.0);
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    const Mat3 k = hat(v);
    return Rotation(Mat3(Mat3::Identity() + a * k + b * (k * k)),
                    Rotation::unchecked_t{});
}

Vec3 log_so3(const Rotation& r) {
    const Mat3& m = r.matrix();
    const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
    const double theta = std::acos(c);
    if (theta >= std::numbers::pi - kAngleNearPiMargin) {
        throw AngleNearPiError("log_so3: rotation angle " + std::to_string(theta) +
                               " is within 1e-6 of the cut locus");
    }
    // axial = sin(theta) * axis
    const Vec3 axial(0.5 * (m(2, 1) - m(1, 2)),
                     0.5 * (m(0, 2) - m(2, 0)),
                     0.5 * (m(1, 0) - m(0, 1)));
    if (theta < kSmallAngle) {
        const double t2 = theta * theta;
        return (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * axial;
    }
    if (theta < 3.0) {
        return (theta / std::sin(theta)) * axial;
    }
    // Close to the cut locus sin(theta) loses accuracy; recover the axis
    // from the symmetric part instead: R + R^T - (tr - 1) I = 2 (1 - c) u u^T.
    const Mat3 sym = m + m.transpose() - (m.trace() - 1.0) * Mat3::Identity();
    int k = 0;
    sym.diagonal().maxCoeff(&k);
    Vec3 u = sym.col(k).normalized();
    if (u.dot(axial) < 0.0) {
        u = -u;
    }
    return theta * u;
}

double distance(const Rotation& r1, const Rotation& r2) {
    return log_so3(r1 * r2.inverse()).norm();
}

Vec3 dlog_bch(const Vec3& q, const Vec3& xi) {
    const Vec3 qx = q.cross(xi);
    return xi - 0.5 * qx + (1.0 / 12.0) * q.cross(qx);
}

Vec3 sample_tangent_gaussian(double sigma, RngStream& rng) {
    if (sigma <= 0.0) {
        throw std::invalid_argument("sample_tangent_gaussian: sigma must be positive");
    }
    return rng.normal3(sigma);
}

} // namespace icrb
