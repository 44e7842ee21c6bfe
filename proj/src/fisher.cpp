#include "icrb/fisher.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace icrb {
namespace {

Mat3 validated_sym_psd(const Mat3& m, const char* who) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
        throw std::invalid_argument(std::string(who) + ": asymmetry " +
                                    std::to_string(asym));
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        throw std::invalid_argument(std::string(who) + ": negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
    }
    return m;
}

} // namespace

InfoMatrix InfoMatrix::from_matrix(const Mat3& m) {
    return InfoMatrix{validated_sym_psd(m, "InfoMatrix")};
}

CovMatrix CovMatrix::from_matrix(const Mat3& m) {
    return CovMatrix{validated_sym_psd(m, "CovMatrix")};
}

InfoMatrix fisher_single_vector(const Vec3& d, double sigma) {
    if (sigma <= 0.0) {
        throw std::invalid_argument("fisher_single_vector: sigma must be positive");
    }
    const Mat3 j = (d.squaredNorm() * Mat3::Identity() - d * d.transpose()) /
                   (sigma * sigma);
    return InfoMatrix{j};
}

InfoMatrix fisher_wahba(const std::vector<Reference>& refs) {
    if (refs.empty()) {
        throw std::invalid_argument("fisher_wahba: no references");
    }
    Mat3 j = Mat3::Zero();
    for (const Reference& ref : refs) {
        j += fisher_single_vector(ref.d, ref.sigma).j;
    }
    return InfoMatrix{j};
}

InfoMatrix fisher_score_oracle(const Rotation& r,
                               const std::vector<Reference>& refs,
                               std::size_t n_samples, RngStream& rng) {
    if (n_samples < 10000) {
        throw std::invalid_argument("fisher_score_oracle: need at least 1e4 samples");
    }
    if (refs.empty()) {
        throw std::invalid_argument("fisher_score_oracle: no references");
    }
    // Score of one joint observation w.r.t. a left perturbation exp(t xi) r
    // of the attitude. The Gaussian log density gives it in closed form:
    // s = sum_k (1/sigma_k^2) (r X_k) x d_k, with X_k drawn from the model.
    // Diagonal second moments are accumulated directly, off-diagonals via
    // the polarization identity, so the estimate is symmetric by construction.
    Vec3 sq = Vec3::Zero();       // E[s_i^2]
    Vec3 pol = Vec3::Zero();      // E[(s_i + s_j)^2] for (0,1), (0,2), (1,2)
    const Rotation r_inv = r.inverse();
    for (std::size_t n = 0; n < n_samples; ++n) {
        Vec3 s = Vec3::Zero();
        for (const Reference& ref : refs) {
            const Vec3 x = r_inv * (ref.d + rng.normal3(ref.sigma));
            s += (r * x).cross(ref.d) / (ref.sigma * ref.sigma);
        }
        sq += s.cwiseProduct(s);
        pol += Vec3((s(0) + s(1)) * (s(0) + s(1)),
                    (s(0) + s(2)) * (s(0) + s(2)),
                    (s(1) + s(2)) * (s(1) + s(2)));
    }
    const double inv_n = 1.0 / static_cast<double>(n_samples);
    Mat3 j;
    j(0, 0) = sq(0) * inv_n;
    j(1, 1) = sq(1) * inv_n;
    j(2, 2) = sq(2) * inv_n;
    j(0, 1) = j(1, 0) = 0.5 * (pol(0) * inv_n - j(0, 0) - j(1, 1));
    j(0, 2) = j(2, 0) = 0.5 * (pol(1) * inv_n - j(0, 0) - j(2, 2));
    j(1, 2) = j(2, 1) = 0.5 * (pol(2) * inv_n - j(1, 1) - j(2, 2));
    return InfoMatrix{j};
}

Mat3 invert_information(const InfoMatrix& j) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(j.j);
    if (es.eigenvalues().minCoeff() <= 1e-12) {
        throw SingularInformationError(
            "information matrix is singular (smallest eigenvalue " +
            std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    const Vec3 inv = es.eigenvalues().cwiseInverse();
    const Mat3 m = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (m + m.transpose());
}

Mat3 icrlb(const InfoMatrix& j, const CovMatrix& p) {
    const Mat3 jinv = invert_information(j);
    const Mat3 c = p.p.trace() * Mat3::Identity() - p.p;
    const Mat3 bound = jinv - (c * jinv + jinv * c) / 12.0;
    return 0.5 * (bound + bound.transpose());
}

Mat3 icrlb_squared_form(const InfoMatrix& j, const CovMatrix& p) {
    const Mat3 jinv = invert_information(j);
    const Mat3 m =
        (1.0 - p.p.trace() / 12.0) * Mat3::Identity() + p.p / 12.0;
    const Mat3 bound = m * jinv * m;
    return 0.5 * (bound + bound.transpose());
}

CurvatureTerm curvature_operator(const CovMatrix& p) {
    return CurvatureTerm{-0.25 * (p.p - p.p.trace() * Mat3::Identity())};
}

double smith_form_check(const InfoMatrix& j, const CovMatrix& p) {
    // Rearranged Smith inequality, written with C = P - Tr(P) I:
    //   P - (1/12)(C J^-1 + J^-1 C) - (1/144) C J^-1 C  >=  J^-1
    // versus the developed squared form P >= M J^-1 M, rearranged onto the
    // same left-hand side. Identical in exact arithmetic.
    const Mat3 jinv = invert_information(j);
    const Mat3 c = p.p - p.p.trace() * Mat3::Identity();
    const Mat3 smith_lhs =
        p.p - (c * jinv + jinv * c) / 12.0 - (c * jinv * c) / 144.0;
    const Mat3 squared_lhs = p.p - icrlb_squared_form(j, p) + jinv;
    return (smith_lhs - squared_lhs).norm();
}

bool loewner_geq(const Mat3& a, const Mat3& b, double tol) {
    const Mat3 diff = 0.5 * ((a - b) + (a - b).transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> es(diff, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

} // namespace icrb
