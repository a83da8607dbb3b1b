#pragma once

#include <optional>

#include "snn/linalg.hpp"

namespace snn {

// The problem pair (F, x): n x m feedforward matrix and target signal.
struct Instance {
    Mat F;
    Vec x;

    int n() const { return static_cast<int>(F.rows()); }
    int m() const { return static_cast<int>(F.cols()); }
    void validate() const;
};

enum class ProblemKind { Nnls, L1MinNonneg, L1MinSigned, LassoNonneg };

// Which walls a potential can fire against: one-sided (v_i > eta) or
// two-sided (|v_i| > eta).
enum class SpikeMode { Signed, Nonneg };

struct Problem {
    ProblemKind kind = ProblemKind::Nnls;
    double beta = 0.0;  // Lasso regularization weight, > 0 iff LassoNonneg

    static Problem nnls() { return {ProblemKind::Nnls, 0.0}; }
    static Problem l1_nonneg() { return {ProblemKind::L1MinNonneg, 0.0}; }
    static Problem l1_signed() { return {ProblemKind::L1MinSigned, 0.0}; }
    static Problem lasso(double beta) { return {ProblemKind::LassoNonneg, beta}; }
    void validate() const;
};

// Dual-polytope side convention for each problem kind.
SpikeMode mode_for(ProblemKind kind);

bool is_nonneg_kind(ProblemKind kind);

// NNLS -> 0.5 ||x - F^T r||^2; L1Min* -> ||r||_1; Lasso -> NNLS + beta ||r||_1.
double objective(const Problem& problem, const Instance& inst, const Vec& r);

// E(r) = r^T FF^T r - 2 r^T F x  (= ||x - F^T r||^2 - ||x||^2)
double energy(const Instance& inst, const Vec& r);

// l1 kinds -> x^T u; Lasso -> 0.5||x||^2 - 0.5||x - beta u||^2.
double dual_objective(const Problem& problem, const Instance& inst, const Vec& u);

// Worst violation of the dual constraint F u <= eta (both signs in signed
// mode). Zero means u is feasible for the eta-scaled dual polytope.
double dual_feasibility_violation(const Instance& inst, const Vec& u, double eta,
                                  SpikeMode mode);

// objective(r) - dual_objective(u / eta); weak duality makes this >= -tol.
double duality_gap(const Problem& problem, const Instance& inst, const Vec& r,
                   const Vec& u, double eta);

// Solution summary shared by oracles and the harness.
struct SolveResult {
    Vec r;
    double residual = 0.0;
    double l1_norm = 0.0;
    double objective = 0.0;
    std::optional<Vec> dual_point;
    std::optional<double> duality_gap;
};

// Evaluates residual, l1 norm, objective and (when a dual point is given)
// the duality gap for a candidate solution.
SolveResult make_solve_result(const Problem& problem, const Instance& inst,
                              const Vec& r,
                              const std::optional<Vec>& dual_point = {},
                              double eta = 1.0);

}  // namespace snn
