// Command-line front end: instance generation, parameter selection,
// SNN runs with CSV traces, reference oracles, polytope diagnostics and
// trace verification.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "snn/errors.hpp"
#include "snn/geometry.hpp"
#include "snn/harness.hpp"
#include "snn/io.hpp"
#include "snn/oracles.hpp"
#include "snn/rng.hpp"

namespace {

using namespace snn;

Instance instance_from(const std::string& path) {
    if (path.empty()) throw ConfigError("--instance PATH is required");
    return load_instance(path);
}

Problem problem_from(const std::string& kind, double beta) {
    const ProblemKind k = kind_from_string(kind);
    if (k == ProblemKind::LassoNonneg) return Problem::lasso(beta);
    Problem p;
    p.kind = k;
    return p;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Spiking-network solvers for NNLS, l1 minimization and "
                 "non-negative Lasso, with geometry diagnostics and oracles"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an RSM instance file");
    int gen_n = 6, gen_m = 3, gen_sparsity = 1;
    std::uint64_t gen_seed = 1;
    double gen_amplitude = 1.0;
    std::string gen_xmode = "gaussian", gen_out = "instance.json";
    gen->add_option("--n", gen_n, "number of neurons (rows)")->required();
    gen->add_option("--m", gen_m, "signal dimension (columns)")->required();
    gen->add_option("--seed", gen_seed, "PRNG seed");
    gen->add_option("--x-mode", gen_xmode, "gaussian | sparse")
        ->check(CLI::IsMember({"gaussian", "sparse"}));
    gen->add_option("--sparsity", gen_sparsity, "nonzeros in r0 (sparse mode)");
    gen->add_option("--amplitude", gen_amplitude, "scale of r0 entries");
    gen->add_option("--out", gen_out, "output instance path");

    // params
    auto* params_cmd = app.add_subcommand("params", "print auto-derived params");
    std::string params_instance, params_kind = "nnls";
    double params_beta = 0.0;
    params_cmd->add_option("--instance", params_instance, "instance file")
        ->required();
    params_cmd->add_option("--kind", params_kind, "nnls|l1|l1signed|lasso")
        ->check(CLI::IsMember({"nnls", "l1", "l1signed", "lasso"}));
    params_cmd->add_option("--beta", params_beta, "Lasso beta");

    // run
    auto* run_cmd = app.add_subcommand("run", "run the SNN and write a trace");
    std::string run_instance, run_kind = "nnls", run_out = "out";
    std::string run_params_file;
    double run_beta = 0.0;
    std::int64_t run_tmax = 10000, run_probe = 1;
    int run_n = 0, run_m = 0, run_sparsity = 1;
    std::uint64_t run_seed = 1;
    std::string run_xmode = "gaussian";
    double run_amplitude = 1.0;
    bool run_auto = false, run_with_oracle = false, run_with_verify = false;
    run_cmd->add_option("--instance", run_instance,
                        "instance file (omit to generate)");
    run_cmd->add_option("--n", run_n, "rows for the generator");
    run_cmd->add_option("--m", run_m, "columns for the generator");
    run_cmd->add_option("--seed", run_seed, "generator seed");
    run_cmd->add_option("--x-mode", run_xmode, "gaussian | sparse")
        ->check(CLI::IsMember({"gaussian", "sparse"}));
    run_cmd->add_option("--sparsity", run_sparsity, "nonzeros in r0");
    run_cmd->add_option("--amplitude", run_amplitude, "scale of r0 entries");
    run_cmd->add_option("--kind", run_kind, "nnls|l1|l1signed|lasso")
        ->check(CLI::IsMember({"nnls", "l1", "l1signed", "lasso"}));
    run_cmd->add_option("--beta", run_beta, "Lasso beta");
    run_cmd->add_flag("--auto-params", run_auto, "derive params from theory");
    run_cmd->add_option("--params", run_params_file,
                        "params JSON (alternative to --auto-params)");
    run_cmd->add_option("--tmax", run_tmax, "number of steps");
    run_cmd->add_option("--probe-every", run_probe, "trace probe stride");
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_flag("--oracle", run_with_oracle, "compare with the oracle");
    run_cmd->add_flag("--verify", run_with_verify, "verify the run afterwards");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "run a reference solver");
    std::string oracle_instance, oracle_kind = "nnls";
    double oracle_beta = 0.0, oracle_tol = 1e-10;
    oracle_cmd->add_option("--instance", oracle_instance, "instance file")
        ->required();
    oracle_cmd->add_option("--kind", oracle_kind, "nnls|l1|l1signed|lasso")
        ->check(CLI::IsMember({"nnls", "l1", "l1signed", "lasso"}));
    oracle_cmd->add_option("--beta", oracle_beta, "Lasso beta");
    oracle_cmd->add_option("--tol", oracle_tol, "solver tolerance");

    // niceness
    auto* nice_cmd = app.add_subcommand("niceness", "gamma(F) geometry report");
    std::string nice_instance, nice_out;
    nice_cmd->add_option("--instance", nice_instance, "instance file")->required();
    nice_cmd->add_option("--out", nice_out, "write the JSON report here");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "verify an existing trace");
    std::string verify_instance, verify_trace, verify_params, verify_kind = "nnls";
    double verify_beta = 0.0;
    verify_cmd->add_option("--instance", verify_instance, "instance file")
        ->required();
    verify_cmd->add_option("--trace", verify_trace, "trace CSV")->required();
    verify_cmd->add_option("--params", verify_params, "params JSON")->required();
    verify_cmd->add_option("--kind", verify_kind, "nnls|l1|l1signed|lasso")
        ->check(CLI::IsMember({"nnls", "l1", "l1signed", "lasso"}));
    verify_cmd->add_option("--beta", verify_beta, "Lasso beta");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        const Mat F = gen_rsm(gen_n, gen_m, gen_seed);
        const XMode mode =
            gen_xmode == "sparse" ? XMode::SparseNonneg : XMode::Gaussian;
        const SignalInfo info =
            gen_signal(F, gen_seed + 1, mode, gen_sparsity, gen_amplitude);
        Instance inst{F, info.x};
        std::ostringstream meta;
        meta << "{\"generator\": \"" << kGeneratorName
             << "\", \"seed\": " << gen_seed << ", \"x_mode\": \"" << gen_xmode
             << "\"}";
        save_instance(inst, gen_out, meta.str());
        std::cout << "wrote " << gen_out << " (n=" << gen_n << ", m=" << gen_m
                  << ", seed=" << gen_seed << ")\n";
        return 0;
    }

    if (params_cmd->parsed()) {
        const Instance inst = instance_from(params_instance);
        const SnnParams params =
            auto_params(inst, problem_from(params_kind, params_beta));
        std::cout << params_to_json(params);
        return 0;
    }

    if (run_cmd->parsed()) {
        ExperimentConfig cfg;
        cfg.instance_path = run_instance;
        cfg.n = run_n;
        cfg.m = run_m;
        cfg.seed = run_seed;
        cfg.x_mode = run_xmode == "sparse" ? XMode::SparseNonneg : XMode::Gaussian;
        cfg.sparsity = run_sparsity;
        cfg.amplitude = run_amplitude;
        cfg.problem = problem_from(run_kind, run_beta);
        cfg.t_max = run_tmax;
        cfg.probe_every = run_probe;
        cfg.out_dir = run_out;
        cfg.run_oracle = run_with_oracle;
        cfg.run_verify = run_with_verify;
        if (!run_params_file.empty()) {
            cfg.use_auto_params = false;
            cfg.params = load_params(run_params_file);
        } else if (run_auto) {
            cfg.use_auto_params = true;
        } else {
            throw ConfigError("pass --auto-params or --params FILE");
        }
        const ExperimentResult result = run_experiment(cfg);
        std::cout << result.summary_json;
        return 0;
    }

    if (oracle_cmd->parsed()) {
        const Instance inst = instance_from(oracle_instance);
        const ProblemKind kind = kind_from_string(oracle_kind);
        OracleResult result;
        switch (kind) {
            case ProblemKind::Nnls:
                result = nnls_oracle(inst, oracle_tol);
                break;
            case ProblemKind::L1MinNonneg:
            case ProblemKind::L1MinSigned:
                result = l1min_oracle(inst, mode_for(kind));
                break;
            case ProblemKind::LassoNonneg:
                result = lasso_oracle(inst, oracle_beta);
                break;
        }
        const SolveResult summary = make_solve_result(
            problem_from(oracle_kind, oracle_beta), inst, result.r_star);
        std::cout << "opt_value = " << format_g17(result.opt_value) << "\n"
                  << "objective = " << format_g17(summary.objective) << "\n"
                  << "residual = " << format_g17(summary.residual) << "\n"
                  << "l1_norm = " << format_g17(summary.l1_norm) << "\n"
                  << "kkt_residual = " << format_g17(result.kkt_residual) << "\n"
                  << "r_star = [";
        for (Eigen::Index i = 0; i < result.r_star.size(); ++i) {
            if (i) std::cout << ", ";
            std::cout << format_g17(result.r_star[i]);
        }
        std::cout << "]\n";
        return 0;
    }

    if (nice_cmd->parsed()) {
        const Instance inst = instance_from(nice_instance);
        const NicenessReport report = niceness(inst.F);
        const std::string text = niceness_to_json(report);
        if (!nice_out.empty()) write_text_file(nice_out, text);
        std::cout << text;
        return 0;
    }

    if (verify_cmd->parsed()) {
        const Instance inst = instance_from(verify_instance);
        const SnnParams params = load_params(verify_params);
        const auto rows = load_trace(verify_trace);
        const VerificationReport report = verify_run(
            inst, params, problem_from(verify_kind, verify_beta), rows);
        std::cout << report.to_text();
        return report.all_pass() ? 0 : 1;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const snn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
