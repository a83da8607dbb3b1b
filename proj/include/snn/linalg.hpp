#pragma once

#include <Eigen/Dense>

namespace snn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Extremal nonzero eigenvalues of the Gram matrix FF^T.
struct SpectralData {
    double lambda_min_nz = 0.0;  // smallest eigenvalue above the rank cutoff
    double lambda_max = 0.0;
    double kappa = 1.0;          // lambda_max / lambda_min_nz
    int rank = 0;
};

// Eigendecomposition of FF^T, shared by everything that needs the spectrum,
// the pseudo-inverse, or the row-space projector. Eigenvalues below
// tol_rank * lambda_max are treated as zero.
class GramFactor {
public:
    explicit GramFactor(const Mat& F, double tol_rank = 1e-10);

    const SpectralData& spectral() const { return spectral_; }
    int n() const { return static_cast<int>(F_.rows()); }
    int m() const { return static_cast<int>(F_.cols()); }
    const Mat& F() const { return F_; }

    // sqrt(w^T (FF^T)^dagger w)
    double pinv_norm(const Vec& w) const;
    // (FF^T)^dagger w
    Vec pinv_apply(const Vec& w) const;
    // Orthogonal projection of x onto the row space of F.
    Vec project_rowspace(const Vec& x) const;

private:
    Mat F_;
    Mat eigvecs_;    // columns are eigenvectors of FF^T, eigenvalues ascending
    Vec eigvals_;
    double cutoff_ = 0.0;
    SpectralData spectral_;
};

SpectralData spectral(const Mat& F, double tol_rank = 1e-10);

// x_F: orthogonal projection of x onto the row space of F.
Vec project_rowspace(const Mat& F, const Vec& x);

// ||r||_{FF^T} = sqrt(r^T FF^T r) = ||F^T r||_2
double gram_norm(const Mat& F, const Vec& r);

// ||w||_{(FF^T)^dagger} = sqrt(w^T (FF^T)^dagger w)
double pinv_gram_norm(const Mat& F, const Vec& w);

// ||x - F^T r||_2
double residual_l2(const Mat& F, const Vec& x, const Vec& r);

}  // namespace snn
