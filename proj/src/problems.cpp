#include "snn/problems.hpp"

#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

namespace {

constexpr double kNegTol = 1e-12;       // slack on r >= 0 for non-negative kinds
constexpr double kFeasTol = 1e-8;       // dual/primal feasibility acceptance

void require_rate(const Instance& inst, const Vec& r) {
    if (r.size() != inst.F.rows())
        throw DimensionMismatch("rate vector length " + std::to_string(r.size()) +
                                " != n = " + std::to_string(inst.F.rows()));
}

void require_dual(const Instance& inst, const Vec& u) {
    if (u.size() != inst.F.cols())
        throw DimensionMismatch("dual vector length " + std::to_string(u.size()) +
                                " != m = " + std::to_string(inst.F.cols()));
}

// Clamp tiny negatives to zero; reject anything below -kNegTol.
Vec clamped_nonneg(const Vec& r) {
    Vec out = r;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        if (out[i] < -kNegTol)
            throw NegativeEntry("entry " + std::to_string(i) + " = " +
                                std::to_string(out[i]) + " below -1e-12");
        if (out[i] < 0.0) out[i] = 0.0;
    }
    return out;
}

}  // namespace

void Instance::validate() const {
    if (F.rows() < 1 || F.cols() < 1)
        throw DimensionMismatch("instance needs n >= 1 and m >= 1");
    if (!F.allFinite()) throw DimensionMismatch("F has non-finite entries");
    if (x.size() != F.cols())
        throw DimensionMismatch("x length " + std::to_string(x.size()) +
                                " != m = " + std::to_string(F.cols()));
    if (!x.allFinite()) throw DimensionMismatch("x has non-finite entries");
}

void Problem::validate() const {
    if (kind == ProblemKind::LassoNonneg) {
        if (!(beta > 0.0)) throw ConfigError("Lasso requires beta > 0");
    } else if (beta != 0.0) {
        throw ConfigError("beta is only meaningful for the Lasso kind");
    }
}

SpikeMode mode_for(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Nnls: return SpikeMode::Signed;
        case ProblemKind::L1MinSigned: return SpikeMode::Signed;
        case ProblemKind::L1MinNonneg: return SpikeMode::Nonneg;
        case ProblemKind::LassoNonneg: return SpikeMode::Nonneg;
    }
    throw ConfigError("unknown problem kind");
}

bool is_nonneg_kind(ProblemKind kind) { return kind != ProblemKind::L1MinSigned; }

double objective(const Problem& problem, const Instance& inst, const Vec& r) {
    require_rate(inst, r);
    const Vec eval = is_nonneg_kind(problem.kind) ? clamped_nonneg(r) : r;
    switch (problem.kind) {
        case ProblemKind::Nnls:
            return 0.5 * std::pow((inst.x - inst.F.transpose() * eval).norm(), 2);
        case ProblemKind::L1MinNonneg:
        case ProblemKind::L1MinSigned:
            return eval.lpNorm<1>();
        case ProblemKind::LassoNonneg:
            return 0.5 * std::pow((inst.x - inst.F.transpose() * eval).norm(), 2) +
                   problem.beta * eval.lpNorm<1>();
    }
    throw ConfigError("unknown problem kind");
}

double energy(const Instance& inst, const Vec& r) {
    require_rate(inst, r);
    const Vec ftr = inst.F.transpose() * r;
    return ftr.squaredNorm() - 2.0 * ftr.dot(inst.x);
}

double dual_objective(const Problem& problem, const Instance& inst, const Vec& u) {
    require_dual(inst, u);
    switch (problem.kind) {
        case ProblemKind::L1MinNonneg:
        case ProblemKind::L1MinSigned:
            return inst.x.dot(u);
        case ProblemKind::LassoNonneg:
            return 0.5 * inst.x.squaredNorm() -
                   0.5 * (inst.x - problem.beta * u).squaredNorm();
        case ProblemKind::Nnls:
            throw UnsupportedKind("NNLS has no dual program here");
    }
    throw ConfigError("unknown problem kind");
}

double dual_feasibility_violation(const Instance& inst, const Vec& u, double eta,
                                  SpikeMode mode) {
    require_dual(inst, u);
    const Vec fu = inst.F * u;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < fu.size(); ++i) {
        const double margin =
            (mode == SpikeMode::Signed ? std::abs(fu[i]) : fu[i]) - eta;
        if (margin > worst) worst = margin;
    }
    return worst;
}

SolveResult make_solve_result(const Problem& problem, const Instance& inst,
                              const Vec& r, const std::optional<Vec>& dual_point,
                              double eta) {
    SolveResult result;
    result.r = r;
    result.residual = (inst.x - inst.F.transpose() * r).norm();
    result.l1_norm = r.lpNorm<1>();
    result.objective = objective(problem, inst, r);
    if (dual_point) {
        result.dual_point = dual_point;
        result.duality_gap = duality_gap(problem, inst, r, *dual_point, eta);
    }
    return result;
}

double duality_gap(const Problem& problem, const Instance& inst, const Vec& r,
                   const Vec& u, double eta) {
    require_rate(inst, r);
    require_dual(inst, u);
    const SpikeMode mode = mode_for(problem.kind);
    if (dual_feasibility_violation(inst, u, eta, mode) > kFeasTol)
        throw InfeasibleDualPoint("dual point violates F u <= eta beyond 1e-8");
    if (is_nonneg_kind(problem.kind) && r.minCoeff() < -kFeasTol)
        throw InfeasiblePrimalPoint("rate has negative entries beyond tolerance");
    if (problem.kind == ProblemKind::L1MinNonneg ||
        problem.kind == ProblemKind::L1MinSigned) {
        const double defect = (inst.x - inst.F.transpose() * r).norm();
        if (defect > kFeasTol * (1.0 + inst.x.norm()))
            throw InfeasiblePrimalPoint("rate does not satisfy F^T r = x");
    }
    return objective(problem, inst, r) - dual_objective(problem, inst, u / eta);
}

}  // namespace snn
