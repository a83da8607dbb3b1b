#include "snn/linalg.hpp"

#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

namespace {

void require_finite(const Mat& F) {
    if (F.rows() < 1 || F.cols() < 1)
        throw DimensionMismatch("matrix must be at least 1x1");
    if (!F.allFinite()) throw DimensionMismatch("matrix has non-finite entries");
}

void require_length(const Vec& v, Eigen::Index len, const char* what) {
    if (v.size() != len)
        throw DimensionMismatch(std::string(what) + ": expected length " +
                                std::to_string(len) + ", got " +
                                std::to_string(v.size()));
}

}  // namespace

GramFactor::GramFactor(const Mat& F, double tol_rank) : F_(F) {
    require_finite(F_);
    const Mat gram = F_ * F_.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> solver(gram);
    eigvals_ = solver.eigenvalues();   // ascending
    eigvecs_ = solver.eigenvectors();

    const double lambda_max = eigvals_[eigvals_.size() - 1];
    if (!(lambda_max > 0.0)) throw AllZeroMatrix("FF^T has no positive eigenvalue");
    cutoff_ = tol_rank * lambda_max;

    double lambda_min_nz = lambda_max;
    int rank = 0;
    for (Eigen::Index i = 0; i < eigvals_.size(); ++i) {
        if (eigvals_[i] > cutoff_) {
            ++rank;
            if (eigvals_[i] < lambda_min_nz) lambda_min_nz = eigvals_[i];
        }
    }
    if (rank == 0) throw AllZeroMatrix("all eigenvalues of FF^T below rank cutoff");

    spectral_.lambda_max = lambda_max;
    spectral_.lambda_min_nz = lambda_min_nz;
    spectral_.kappa = lambda_max / lambda_min_nz;
    spectral_.rank = rank;
}

double GramFactor::pinv_norm(const Vec& w) const {
    require_length(w, F_.rows(), "pinv_norm input");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eigvals_.size(); ++i) {
        if (eigvals_[i] <= cutoff_) continue;
        const double c = eigvecs_.col(i).dot(w);
        acc += c * c / eigvals_[i];
    }
    return std::sqrt(acc);
}

Vec GramFactor::pinv_apply(const Vec& w) const {
    require_length(w, F_.rows(), "pinv_apply input");
    Vec out = Vec::Zero(F_.rows());
    for (Eigen::Index i = 0; i < eigvals_.size(); ++i) {
        if (eigvals_[i] <= cutoff_) continue;
        out += (eigvecs_.col(i).dot(w) / eigvals_[i]) * eigvecs_.col(i);
    }
    return out;
}

Vec GramFactor::project_rowspace(const Vec& x) const {
    require_length(x, F_.cols(), "project_rowspace input");
    return F_.transpose() * pinv_apply(F_ * x);
}

SpectralData spectral(const Mat& F, double tol_rank) {
    return GramFactor(F, tol_rank).spectral();
}

Vec project_rowspace(const Mat& F, const Vec& x) {
    return GramFactor(F).project_rowspace(x);
}

double gram_norm(const Mat& F, const Vec& r) {
    require_finite(F);
    require_length(r, F.rows(), "gram_norm input");
    return (F.transpose() * r).norm();
}

double pinv_gram_norm(const Mat& F, const Vec& w) {
    return GramFactor(F).pinv_norm(w);
}

double residual_l2(const Mat& F, const Vec& x, const Vec& r) {
    require_finite(F);
    require_length(x, F.cols(), "residual_l2 signal");
    require_length(r, F.rows(), "residual_l2 rate");
    return (x - F.transpose() * r).norm();
}

}  // namespace snn
