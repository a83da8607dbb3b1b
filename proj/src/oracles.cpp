#include "snn/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snn/errors.hpp"
#include "snn/linalg.hpp"

namespace snn {

namespace {

std::vector<int> support_of(const Vec& r, double tol = 1e-12) {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        if (std::abs(r[i]) > tol) out.push_back(static_cast<int>(i));
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc = acc * (n - i) / (i + 1);
    return acc;
}

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

OracleResult nnls_oracle(const Instance& inst, double tol, long long max_iters) {
    inst.validate();
    if (!(tol > 0.0)) throw ConfigError("nnls_oracle: tol must be > 0");
    const GramFactor factor(inst.F);
    const Mat gram = inst.F * inst.F.transpose();
    const Vec fx = inst.F * inst.x;
    const double step = 1.0 / factor.spectral().lambda_max;

    Vec r = Vec::Zero(inst.n());
    double pg_norm = 0.0;
    long long iter = 0;
    for (;; ++iter) {
        if (iter >= max_iters)
            throw IterationCapExceeded("nnls_oracle cap " +
                                       std::to_string(max_iters) + " reached");
        const Vec grad = gram * r - fx;
        pg_norm = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            const double pg = r[i] > 0.0 ? grad[i] : std::min(grad[i], 0.0);
            pg_norm = std::max(pg_norm, std::abs(pg));
        }
        if (pg_norm <= tol) break;
        r = (r - step * grad).cwiseMax(0.0);
    }

    OracleResult out;
    out.r_star = r;
    out.residual = residual_l2(inst.F, inst.x, r);
    out.l1_norm = r.lpNorm<1>();
    out.opt_value = 0.5 * out.residual * out.residual;
    out.kkt_residual = pg_norm;
    out.method = OracleMethod::ProjectedGradient;
    out.support = support_of(r);
    return out;
}

OracleResult l1min_oracle(const Instance& inst, SpikeMode mode,
                          long long enumeration_cap) {
    inst.validate();
    const int n = inst.n();
    const int m = inst.m();
    if (binomial(n, m) * std::pow(2.0, m) > static_cast<double>(enumeration_cap))
        throw EnumerationCapExceeded("l1min_oracle: C(n,m)*2^m exceeds cap");

    const Vec x_f = project_rowspace(inst.F, inst.x);
    const double range_tol = 1e-8 * (1.0 + inst.x.norm());
    if ((inst.x - x_f).norm() > range_tol)
        throw Infeasible("x is not in the row space of F");

    const bool nonneg = (mode == SpikeMode::Nonneg);
    bool found = false;
    double best_l1 = 0.0;
    Vec best_r;
    std::vector<int> best_support;
    double best_solve_residual = 0.0;

    auto consider = [&](const std::vector<int>& support) {
        const int k = static_cast<int>(support.size());
        Vec r_s(k);
        double solve_residual = 0.0;
        if (k > 0) {
            Mat cols(m, k);
            for (int j = 0; j < k; ++j)
                cols.col(j) = inst.F.row(support[j]).transpose();
            Eigen::ColPivHouseholderQR<Mat> qr(cols);
            qr.setThreshold(1e-10);
            if (qr.rank() < k) return;  // rank-deficient support
            r_s = qr.solve(inst.x);
            solve_residual = (cols * r_s - inst.x).norm();
            if (solve_residual > range_tol) return;  // x outside the span
            if (nonneg) {
                if (r_s.minCoeff() < -1e-10) return;
                r_s = r_s.cwiseMax(0.0);  // absorb factorization round-off
            }
        } else {
            solve_residual = inst.x.norm();
            if (solve_residual > range_tol) return;
        }
        const double l1 = r_s.lpNorm<1>();
        const double tie_tol = 1e-12 * (1.0 + (found ? best_l1 : 0.0));
        const bool better =
            !found || l1 < best_l1 - tie_tol ||
            (std::abs(l1 - best_l1) <= tie_tol && support < best_support);
        if (better) {
            found = true;
            best_l1 = l1;
            best_support = support;
            best_solve_residual = solve_residual;
            best_r = Vec::Zero(n);
            for (int j = 0; j < k; ++j) best_r[support[j]] = r_s[j];
        }
    };

    consider({});
    for (int k = 1; k <= std::min(m, n); ++k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        do {
            consider(idx);
        } while (next_combination(idx, n));
    }

    if (!found)
        throw Infeasible(nonneg ? "no non-negative support reproduces x"
                                : "no full-rank support reproduces x");

    OracleResult out;
    out.r_star = best_r;
    out.opt_value = best_l1;
    out.l1_norm = best_l1;
    out.residual = residual_l2(inst.F, inst.x, best_r);
    out.kkt_residual = best_solve_residual;
    out.method = OracleMethod::SupportEnumeration;
    out.support = best_support;
    return out;
}

OracleResult lasso_oracle(const Instance& inst, double beta, double tol,
                          long long max_sweeps) {
    inst.validate();
    if (!(beta > 0.0)) throw ConfigError("lasso_oracle: beta must be > 0");
    if (!(tol > 0.0)) throw ConfigError("lasso_oracle: tol must be > 0");
    const int n = inst.n();
    Vec r = Vec::Zero(n);
    Vec w = Vec::Zero(inst.m());  // F^T r
    Vec row_sq(n);
    for (int i = 0; i < n; ++i) row_sq[i] = inst.F.row(i).squaredNorm();

    long long sweep = 0;
    for (;; ++sweep) {
        if (sweep >= max_sweeps)
            throw IterationCapExceeded("lasso_oracle cap " +
                                       std::to_string(max_sweeps) + " reached");
        double max_change = 0.0;
        for (int i = 0; i < n; ++i) {
            if (row_sq[i] == 0.0) continue;
            const double corr = inst.F.row(i).dot(inst.x - w);
            const double next = std::max(0.0, r[i] + (corr - beta) / row_sq[i]);
            const double change = next - r[i];
            if (change != 0.0) {
                w += change * inst.F.row(i).transpose();
                r[i] = next;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        if (max_change <= tol) break;
    }

    double kkt = 0.0;
    for (int i = 0; i < n; ++i) {
        const double corr = inst.F.row(i).dot(inst.x - w);
        if (r[i] > tol)
            kkt = std::max(kkt, std::abs(corr - beta));
        else
            kkt = std::max(kkt, std::max(0.0, corr - beta));
    }

    OracleResult out;
    out.r_star = r;
    out.residual = residual_l2(inst.F, inst.x, r);
    out.l1_norm = r.lpNorm<1>();
    out.opt_value = 0.5 * out.residual * out.residual + beta * out.l1_norm;
    out.kkt_residual = kkt;
    out.method = OracleMethod::CoordinateDescent;
    out.support = support_of(r);
    return out;
}

Vec least_squares_min_norm(const Instance& inst) {
    inst.validate();
    const GramFactor factor(inst.F);
    return factor.pinv_apply(inst.F * inst.x);
}

}  // namespace snn
