#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snn/engine.hpp"
#include "snn/oracles.hpp"
#include "snn/problems.hpp"

namespace snn {

// n independent uniform points on the unit sphere of R^m, stacked as rows.
Mat gen_rsm(int n, int m, std::uint64_t seed);

enum class XMode { Gaussian, SparseNonneg };

struct SignalInfo {
    Vec x;
    Vec r0;                    // sparse generator, only set for SparseNonneg
    std::vector<int> support;  // 0-based support of r0
};

// Target signal for a given F: raw Gaussian, or x = F^T r0 for a sparse
// non-negative r0 (which makes the l1 programs feasible by construction).
SignalInfo gen_signal(const Mat& F, std::uint64_t seed, XMode mode,
                      int sparsity = 1, double amplitude = 1.0);

// Theorem-driven parameter selection from the spectrum (and, for the l1 and
// Lasso kinds, the niceness parameter). Throws GammaZero when gamma(F) = 0.
SnnParams auto_params(const Instance& inst, const Problem& problem,
                      std::int64_t t_max = 10000);

struct VerifyTolerances {
    double coupling = 1e-9;
    double conservation_scale = 1e-8;  // x (1 + ||Fx||_inf)
    double weak_duality_scale = 1e-6;  // x (1 + OPT)
    double nnls_residual_frac = 0.05;  // x ||x_F||
    double l1_gap_frac = 0.10;         // x OPT
    double lasso_dist_frac = 0.10;     // x ||x||
    double trace_match_rel = 1e-12;
};

struct CheckResult {
    std::string name;
    bool applicable = true;
    bool pass = true;
    double observed = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;  // every applicable check passed
    std::string to_text() const;
    std::string to_json() const;
};

// Re-simulates the run (deterministic), confirms the given trace matches,
// and evaluates every applicable invariant at its tolerance.
VerificationReport verify_run(const Instance& inst, const SnnParams& params,
                              const Problem& problem,
                              const std::vector<TraceRow>& rows,
                              const VerifyTolerances& tol = {});

struct ExperimentConfig {
    // instance source: a file, or the RSM generator below
    std::string instance_path;
    int n = 0;
    int m = 0;
    std::uint64_t seed = 1;
    XMode x_mode = XMode::Gaussian;
    int sparsity = 1;
    double amplitude = 1.0;

    Problem problem;
    bool use_auto_params = true;
    SnnParams params;  // used verbatim when use_auto_params is false
    std::int64_t t_max = 10000;
    std::int64_t probe_every = 1;

    std::string out_dir = ".";
    bool run_oracle = false;
    bool run_verify = false;
};

struct ExperimentResult {
    Instance inst;
    SnnParams params;
    Trace trace;
    SnnState final_state;
    std::string summary_json;
    std::string trace_path;
    std::string summary_path;
    std::string params_path;
};

// Runs the configured experiment, streaming the trace to disk, and writes
// trace.csv, params.json and summary.json under out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace snn
