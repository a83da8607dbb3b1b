#pragma once

#include <vector>

#include "snn/problems.hpp"

namespace snn {

enum class OracleMethod {
    ProjectedGradient,
    SupportEnumeration,
    CoordinateDescent,
    PseudoInverse,
};

struct OracleResult {
    Vec r_star;
    double opt_value = 0.0;      // objective of the problem the oracle solves
    double residual = 0.0;       // ||x - F^T r*||_2
    double l1_norm = 0.0;
    double kkt_residual = 0.0;   // method-specific certificate
    OracleMethod method = OracleMethod::ProjectedGradient;
    std::vector<int> support;    // 0-based indices with |r_i| > 0
};

// NNLS by projected gradient descent with step 1/lambda_max, started at 0,
// run until the projected gradient sup-norm drops below tol.
OracleResult nnls_oracle(const Instance& inst, double tol = 1e-10,
                         long long max_iters = 10000000);

// Exact l1 minimization by exhaustive enumeration of supports of size <= m.
// Ties are broken by lexicographically smallest support.
OracleResult l1min_oracle(const Instance& inst, SpikeMode mode,
                          long long enumeration_cap = 1000000);

// Non-negative Lasso by cyclic coordinate descent, run until the largest
// coordinate change in a sweep drops below tol.
OracleResult lasso_oracle(const Instance& inst, double beta, double tol = 1e-12,
                          long long max_sweeps = 1000000);

// Min-norm least squares baseline r = (FF^T)^dagger F x; F^T r = x_F.
Vec least_squares_min_norm(const Instance& inst);

}  // namespace snn
