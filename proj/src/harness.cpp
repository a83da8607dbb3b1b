#include "snn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "snn/errors.hpp"
#include "snn/geometry.hpp"
#include "snn/io.hpp"
#include "snn/rng.hpp"

namespace snn {

using nlohmann::json;

Mat gen_rsm(int n, int m, std::uint64_t seed) {
    if (n < m || m < 1) throw ConfigError("gen_rsm requires n >= m >= 1");
    Rng rng(seed);
    Mat F(n, m);
    for (int i = 0; i < n; ++i) F.row(i) = rng.unit_sphere(m).transpose();
    return F;
}

SignalInfo gen_signal(const Mat& F, std::uint64_t seed, XMode mode, int sparsity,
                      double amplitude) {
    const int n = static_cast<int>(F.rows());
    const int m = static_cast<int>(F.cols());
    Rng rng(seed);
    SignalInfo info;
    if (mode == XMode::Gaussian) {
        info.x = rng.gaussian_vector(m);
        info.r0 = Vec::Zero(0);
        return info;
    }
    if (sparsity < 1 || sparsity > n)
        throw ConfigError("sparsity must be in [1, n]");
    info.r0 = Vec::Zero(n);
    while (static_cast<int>(info.support.size()) < sparsity) {
        const int idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (std::find(info.support.begin(), info.support.end(), idx) ==
            info.support.end())
            info.support.push_back(idx);
    }
    std::sort(info.support.begin(), info.support.end());
    for (int idx : info.support)
        info.r0[idx] = amplitude * (0.5 + rng.uniform());
    info.x = F.transpose() * info.r0;
    return info;
}

SnnParams auto_params(const Instance& inst, const Problem& problem,
                      std::int64_t t_max) {
    inst.validate();
    problem.validate();
    const GramFactor factor(inst.F);
    const SpectralData& sd = factor.spectral();
    const double nx = factor.project_rowspace(inst.x).norm();
    const double n = static_cast<double>(inst.n());

    SnnParams params;
    params.t_max = t_max;
    params.cascade = CascadePolicy::Exhaustive;
    params.dt = nx > 0.0 ? std::sqrt(sd.lambda_min_nz) / (24.0 * std::sqrt(n) * nx)
                         : 1.0;

    if (problem.kind == ProblemKind::Nnls) {
        params.tau = 0.0;
        params.alpha = 1.0;
        params.eta = sd.lambda_max;
        params.mode = SpikeMode::Signed;
        return params;
    }

    // l1 / Lasso: spike strength from the niceness parameter
    const NicenessReport report = niceness(inst.F);
    if (!(report.gamma > 0.0))
        throw GammaZero("gamma(F) = 0; l1 auto-params are undefined");
    const double gamma = report.gamma;
    const double tau_cpl = gamma / (10.0 * n * n * sd.lambda_max * sd.lambda_max);
    params.alpha = 0.5 * std::min(tau_cpl / static_cast<double>(inst.m()),
                                  tau_cpl * tau_cpl * gamma * gamma * gamma);
    params.eta = 1.0;
    params.mode = mode_for(problem.kind);
    params.tau = problem.kind == ProblemKind::LassoNonneg ? problem.beta : 0.0;
    return params;
}

bool VerificationReport::all_pass() const {
    for (const auto& check : checks)
        if (check.applicable && !check.pass) return false;
    return true;
}

std::string VerificationReport::to_text() const {
    std::ostringstream out;
    for (const auto& check : checks) {
        out << (check.applicable ? (check.pass ? "PASS" : "FAIL") : "N/A ") << "  "
            << check.name;
        if (check.applicable)
            out << "  observed=" << format_g17(check.observed)
                << "  tolerance=" << format_g17(check.tolerance);
        if (!check.note.empty()) out << "  (" << check.note << ")";
        out << "\n";
    }
    return out.str();
}

std::string VerificationReport::to_json() const {
    json arr = json::array();
    for (const auto& check : checks) {
        json item;
        item["name"] = check.name;
        item["applicable"] = check.applicable;
        item["pass"] = check.pass;
        item["observed"] = check.observed;
        item["tolerance"] = check.tolerance;
        if (!check.note.empty()) item["note"] = check.note;
        arr.push_back(item);
    }
    json doc;
    doc["checks"] = arr;
    doc["all_pass"] = all_pass();
    return doc.dump(2);
}

namespace {

bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

VerificationReport verify_run(const Instance& inst, const SnnParams& params,
                              const Problem& problem,
                              const std::vector<TraceRow>& rows,
                              const VerifyTolerances& tol) {
    if (rows.empty()) throw IncompatibleTrace("trace has no rows");
    const std::int64_t probe_every = rows.front().step;
    if (probe_every < 1) throw IncompatibleTrace("first probed step must be >= 1");

    SnnState final_state;
    const Trace fresh = run(inst, params, probe_every, nullptr, &final_state);
    if (fresh.rows.size() < rows.size())
        throw IncompatibleTrace("trace has more rows than a fresh run produces");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TraceRow& a = rows[i];
        const TraceRow& b = fresh.rows[i];
        const bool same =
            a.step == b.step && close_rel(a.time, b.time, tol.trace_match_rel) &&
            close_rel(a.residual_l2, b.residual_l2, tol.trace_match_rel) &&
            close_rel(a.l1_rate, b.l1_rate, tol.trace_match_rel) &&
            close_rel(a.cum_spikes, b.cum_spikes, tol.trace_match_rel) &&
            close_rel(a.pinv_norm_v, b.pinv_norm_v, tol.trace_match_rel) &&
            close_rel(a.dual_violation, b.dual_violation, tol.trace_match_rel) &&
            close_rel(a.conservation_defect, b.conservation_defect,
                      tol.trace_match_rel);
        if (!same)
            throw IncompatibleTrace("trace row " + std::to_string(i) +
                                    " does not match a deterministic re-run");
    }

    const GramFactor factor(inst.F);
    const SpectralData& sd = factor.spectral();
    const Vec x_f = factor.project_rowspace(inst.x);
    const double fx_inf = (inst.F * inst.x).lpNorm<Eigen::Infinity>();
    const RunStats& stats = fresh.stats;

    VerificationReport report;

    {
        CheckResult check;
        check.name = "coupling";
        check.observed = stats.max_coupling_defect;
        check.tolerance = tol.coupling;
        check.pass = check.observed <= check.tolerance;
        report.checks.push_back(check);
    }
    {
        CheckResult check;
        check.name = "conservation";
        check.applicable = params.tau == 0.0;
        if (check.applicable) {
            check.observed = stats.max_conservation_defect;
            check.tolerance = tol.conservation_scale * (1.0 + fx_inf);
            check.pass = check.observed <= check.tolerance;
        } else {
            check.note = "leaky run";
        }
        report.checks.push_back(check);
    }
    const bool theorem_regime =
        params.tau == 0.0 && params.alpha == 1.0 &&
        params.mode == SpikeMode::Signed &&
        params.eta >= sd.lambda_max * (1.0 - 1e-12) &&
        params.dt <= std::sqrt(sd.lambda_min_nz) /
                         (24.0 * std::sqrt(static_cast<double>(inst.n())) *
                          std::max(x_f.norm(), 1e-300)) *
                         (1.0 + 1e-12);
    const double potential_cap =
        2.0 * std::sqrt(sd.kappa * params.eta * static_cast<double>(inst.n()));
    {
        CheckResult check;
        check.name = "potential_bound";
        check.applicable = theorem_regime;
        if (check.applicable) {
            check.observed = stats.max_pinv_norm_v;
            check.tolerance = potential_cap;
            check.pass = check.observed <= check.tolerance;
        } else {
            check.note = "preconditions unmet (needs tau=0, alpha=1, signed, "
                         "eta>=lambda_max, dt within bound)";
        }
        report.checks.push_back(check);
    }
    {
        CheckResult check;
        check.name = "theorem_residual_bound";
        check.applicable = theorem_regime;
        if (check.applicable) {
            check.observed = stats.max_residual_time;
            check.tolerance = potential_cap * x_f.norm();
            check.pass = check.observed <= check.tolerance;
        } else {
            check.note = "preconditions unmet";
        }
        report.checks.push_back(check);
    }

    const bool l1_kind = problem.kind == ProblemKind::L1MinNonneg ||
                         problem.kind == ProblemKind::L1MinSigned;
    {
        CheckResult check;
        check.name = "weak_duality";
        check.applicable = l1_kind;
        if (l1_kind) {
            const OracleResult oracle = l1min_oracle(inst, mode_for(problem.kind));
            check.observed = stats.max_dual_value / params.eta - oracle.opt_value;
            check.tolerance = tol.weak_duality_scale * (1.0 + oracle.opt_value);
            check.pass = check.observed <= check.tolerance;
            check.note = "max x^T u / eta minus OPT";
        } else {
            check.note = "only meaningful for l1 kinds";
        }
        report.checks.push_back(check);
    }

    {
        CheckResult check;
        check.name = "oracle_gap";
        switch (problem.kind) {
            case ProblemKind::Nnls: {
                const OracleResult oracle = nnls_oracle(inst, 1e-10);
                check.observed = stats.final_residual - oracle.residual;
                check.tolerance = tol.nnls_residual_frac * x_f.norm();
                check.pass = check.observed <= check.tolerance;
                check.note = "final residual minus NNLS oracle residual";
                break;
            }
            case ProblemKind::L1MinNonneg:
            case ProblemKind::L1MinSigned: {
                const OracleResult oracle = l1min_oracle(inst, mode_for(problem.kind));
                check.observed = std::abs(stats.final_l1 - oracle.opt_value);
                check.tolerance = tol.l1_gap_frac * oracle.opt_value;
                check.pass = check.observed <= check.tolerance;
                check.note = "|final l1 - OPT|";
                break;
            }
            case ProblemKind::LassoNonneg: {
                const OracleResult oracle = lasso_oracle(inst, problem.beta);
                const Vec rate = params.alpha /
                                 (static_cast<double>(stats.steps) * params.dt) *
                                 final_state.cum_spikes;
                check.observed =
                    (inst.F.transpose() * (rate - oracle.r_star)).norm();
                check.tolerance = tol.lasso_dist_frac * inst.x.norm();
                check.pass = check.observed <= check.tolerance;
                check.note = "||F^T r_snn - F^T r_lasso||";
                break;
            }
        }
        report.checks.push_back(check);
    }
    return report;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();

    ExperimentResult result;
    json source;
    if (!cfg.instance_path.empty()) {
        result.inst = load_instance(cfg.instance_path);
        source["file"] = cfg.instance_path;
    } else {
        if (cfg.n < 1 || cfg.m < 1)
            throw ConfigError("generator needs --n and --m");
        result.inst.F = gen_rsm(cfg.n, cfg.m, cfg.seed);
        const SignalInfo info =
            gen_signal(result.inst.F, cfg.seed + 1, cfg.x_mode, cfg.sparsity,
                       cfg.amplitude);
        result.inst.x = info.x;
        source["generator"] = kGeneratorName;
        source["seed"] = cfg.seed;
        source["n"] = cfg.n;
        source["m"] = cfg.m;
        source["x_mode"] =
            cfg.x_mode == XMode::Gaussian ? "gaussian" : "sparse_nonneg";
        if (cfg.x_mode == XMode::SparseNonneg) {
            source["sparsity"] = cfg.sparsity;
            source["amplitude"] = cfg.amplitude;
            source["r0_support"] = info.support;
        }
    }
    result.inst.validate();
    cfg.problem.validate();

    result.params = cfg.use_auto_params
                        ? auto_params(result.inst, cfg.problem, cfg.t_max)
                        : cfg.params;
    result.params.t_max = cfg.t_max;
    result.params.validate();

    fs::create_directories(cfg.out_dir);
    result.trace_path = (fs::path(cfg.out_dir) / "trace.csv").string();
    result.summary_path = (fs::path(cfg.out_dir) / "summary.json").string();
    result.params_path = (fs::path(cfg.out_dir) / "params.json").string();
    save_params(result.params, result.params_path);
    if (cfg.instance_path.empty()) {
        save_instance(result.inst,
                      (fs::path(cfg.out_dir) / "instance.json").string(),
                      source.dump());
    }

    {
        TraceWriter writer(result.trace_path);
        result.trace = run(result.inst, result.params, cfg.probe_every,
                           [&](const TraceRow& row) { writer.write(row); },
                           &result.final_state);
    }

    json summary;
    summary["source"] = source;
    summary["kind"] = kind_to_string(cfg.problem.kind);
    if (cfg.problem.kind == ProblemKind::LassoNonneg)
        summary["beta"] = cfg.problem.beta;
    summary["params"] = json::parse(params_to_json(result.params));
    summary["probe_every"] = cfg.probe_every;
    const RunStats& stats = result.trace.stats;
    summary["stats"] = {
        {"steps", stats.steps},
        {"final_residual", stats.final_residual},
        {"final_l1", stats.final_l1},
        {"total_spike_events", stats.total_spike_events},
        {"max_coupling_defect", stats.max_coupling_defect},
        {"max_conservation_defect", stats.max_conservation_defect},
        {"max_pinv_norm_v", stats.max_pinv_norm_v},
        {"max_dual_violation", stats.max_dual_violation},
        {"max_residual_time", stats.max_residual_time},
        {"max_dual_value", stats.max_dual_value},
    };

    if (cfg.run_oracle) {
        json oracle_block;
        switch (cfg.problem.kind) {
            case ProblemKind::Nnls: {
                const OracleResult oracle = nnls_oracle(result.inst, 1e-10);
                oracle_block["method"] = "projected_gradient";
                oracle_block["residual"] = oracle.residual;
                oracle_block["l1_norm"] = oracle.l1_norm;
                oracle_block["residual_gap"] =
                    stats.final_residual - oracle.residual;
                break;
            }
            case ProblemKind::L1MinNonneg:
            case ProblemKind::L1MinSigned: {
                const OracleResult oracle =
                    l1min_oracle(result.inst, mode_for(cfg.problem.kind));
                oracle_block["method"] = "support_enumeration";
                oracle_block["opt"] = oracle.opt_value;
                oracle_block["l1_gap"] = std::abs(stats.final_l1 - oracle.opt_value);
                break;
            }
            case ProblemKind::LassoNonneg: {
                const OracleResult oracle =
                    lasso_oracle(result.inst, cfg.problem.beta);
                const Vec rate =
                    result.params.alpha /
                    (static_cast<double>(stats.steps) * result.params.dt) *
                    result.final_state.cum_spikes;
                oracle_block["method"] = "coordinate_descent";
                oracle_block["opt"] = oracle.opt_value;
                oracle_block["decode_distance"] =
                    (result.inst.F.transpose() * (rate - oracle.r_star)).norm();
                break;
            }
        }
        summary["oracle"] = oracle_block;
    }

    if (cfg.run_verify) {
        const VerificationReport report =
            verify_run(result.inst, result.params, cfg.problem, result.trace.rows);
        summary["verify"] = json::parse(report.to_json());
    }

    const auto t_end = std::chrono::steady_clock::now();
    summary["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t_end - t_start)
            .count();

    result.summary_json = summary.dump(2) + "\n";
    write_text_file(result.summary_path, result.summary_json);
    return result;
}

}  // namespace snn
