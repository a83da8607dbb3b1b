#include "snn/engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "snn/errors.hpp"
#include "snn/linalg.hpp"

namespace snn {

namespace {

// First round index j >= 1 at which the spike pattern of v + j*d stops
// matching s, given that pattern(v) == s. Linear motion makes every
// threshold crossing a closed-form integer. Returns -1 when the pattern
// would persist forever (the cascade cannot settle).
std::int64_t first_pattern_change(const Vec& v, const Vec& d, const Vec& s,
                                  double eta, SpikeMode mode) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double j = std::numeric_limits<double>::infinity();
        if (s[i] > 0.0) {
            // stops firing when v_i + j d_i <= eta
            if (d[i] < 0.0) j = std::ceil((v[i] - eta) / -d[i]);
        } else if (s[i] < 0.0) {
            // stops firing when v_i + j d_i >= -eta
            if (d[i] > 0.0) j = std::ceil((-eta - v[i]) / d[i]);
        } else {
            // starts firing when v_i + j d_i crosses strictly beyond a wall
            if (d[i] > 0.0) j = std::floor((eta - v[i]) / d[i]) + 1.0;
            if (mode == SpikeMode::Signed && d[i] < 0.0)
                j = std::min(j, std::floor((v[i] + eta) / -d[i]) + 1.0);
        }
        if (j < 1.0) j = 1.0;  // crossing ratios are >= 0 by construction
        if (j < best) best = j;
    }
    if (!std::isfinite(best)) return -1;
    if (best > 1e15)
        throw CascadeDivergence("cascade batch exceeds 1e15 rounds");
    return static_cast<std::int64_t>(best);
}

// Shared by step() and run(); fx = F * x precomputed.
StepEvent step_impl(SnnState& state, const Instance& inst, const Vec& fx,
                    const SnnParams& params) {
    if (state.step >= params.t_max)
        throw StepLimitExceeded("step " + std::to_string(state.step) +
                                " reached t_max = " + std::to_string(params.t_max));
    const Eigen::Index n = inst.F.rows();

    // (1) input charge. The v update is F times the u update.
    state.u += inst.x * params.dt;
    state.v += fx * params.dt;

    // (2) leak
    if (params.tau > 0.0) {
        const double keep = 1.0 - params.tau * params.dt;
        state.u *= keep;
        state.v *= keep;
    }

    // (3) spike cascade. Identical consecutive rounds are applied as one
    // batch of k rounds: the per-round delta is constant while the firing
    // pattern is fixed, so the first pattern change has a closed form and
    // the batch reproduces the round-by-round dynamics. The divergence cap
    // counts pattern sweeps; with theorem-scale alpha a single pattern can
    // legitimately repeat ~dt*||Fx||/alpha rounds, while more than 10n
    // distinct patterns in one step means alpha or eta is misconfigured.
    StepEvent event;
    event.spikes = Vec::Zero(n);
    const int sweep_cap = 10 * static_cast<int>(n);
    for (;;) {
        const Vec s = spike_vector(state.v, params.eta, params.mode);
        if ((s.array() == 0.0).all()) break;
        ++event.cascade_rounds;
        if (event.cascade_rounds > sweep_cap)
            throw CascadeDivergence(
                "cascade exceeded " + std::to_string(sweep_cap) +
                " sweeps; alpha or eta is likely misconfigured");

        Vec du = Vec::Zero(inst.F.cols());
        double fired = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (s[i] != 0.0) {
                du -= (params.alpha * s[i]) * inst.F.row(i).transpose();
                fired += 1.0;
            }
        }
        const Vec dv = inst.F * du;

        std::int64_t k = 1;
        if (params.cascade == CascadePolicy::Exhaustive) {
            k = first_pattern_change(state.v, dv, s, params.eta, params.mode);
            if (k < 0)
                throw CascadeDivergence("spike pattern never settles");
        }
        const double kd = static_cast<double>(k);
        state.u += kd * du;
        state.v += kd * dv;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (s[i] != 0.0) {
                state.cum_spikes[i] += kd * s[i];
                event.spikes[i] = s[i];
            }
        }
        event.spike_events += kd * fired;
        if (params.cascade == CascadePolicy::Once) break;
    }

    ++state.step;
    return event;
}

}  // namespace

void SnnParams::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (tau < 0.0) throw ConfigError("tau must be >= 0");
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    if (tau * dt >= 1.0) throw ConfigError("tau * dt must be < 1");
}

SnnState init(const Instance& inst, const SnnParams& params) {
    inst.validate();
    params.validate();
    SnnState state;
    state.v = Vec::Zero(inst.F.rows());
    state.u = Vec::Zero(inst.F.cols());
    state.cum_spikes = Vec::Zero(inst.F.rows());
    state.step = 0;
    return state;
}

Vec spike_vector(const Vec& v, double eta, SpikeMode mode) {
    Vec s = Vec::Zero(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] > eta)
            s[i] = 1.0;
        else if (mode == SpikeMode::Signed && v[i] < -eta)
            s[i] = -1.0;
    }
    return s;
}

StepEvent step(SnnState& state, const Instance& inst, const SnnParams& params) {
    params.validate();
    return step_impl(state, inst, inst.F * inst.x, params);
}

Vec firing_rate(const SnnState& state, const SnnParams& params) {
    if (state.step < 1) throw ZeroSteps("firing rate undefined before step 1");
    return (params.alpha / (static_cast<double>(state.step) * params.dt)) *
           state.cum_spikes;
}

double conservation_defect(const SnnState& state, const Instance& inst,
                           const SnnParams& params) {
    if (params.tau > 0.0)
        throw LeakyNotSupported("conservation identity requires tau = 0");
    if (state.step < 1) throw ZeroSteps("conservation undefined before step 1");
    const Vec r = firing_rate(state, params);
    const double t_dt = static_cast<double>(state.step) * params.dt;
    const Vec rhs = inst.F * (inst.x - inst.F.transpose() * r);
    return (state.v / t_dt - rhs).lpNorm<Eigen::Infinity>();
}

Trace run(const Instance& inst, const SnnParams& params, std::int64_t probe_every,
          const RowSink& sink, SnnState* final_state) {
    if (probe_every < 1) throw ConfigError("probe_every must be >= 1");
    SnnState state = init(inst, params);
    const GramFactor factor(inst.F);
    const Vec fx = inst.F * inst.x;
    // fixed out-of-rowspace part of x, removed from the theorem-bound margin
    const double off_rowspace_sq =
        (inst.x - factor.project_rowspace(inst.x)).squaredNorm();

    Trace trace;
    trace.rows.reserve(static_cast<std::size_t>(params.t_max / probe_every) + 1);
    RunStats& stats = trace.stats;

    for (std::int64_t t = 1; t <= params.t_max; ++t) {
        step_impl(state, inst, fx, params);

        const double t_dt = static_cast<double>(t) * params.dt;
        const Vec rate = firing_rate(state, params);
        const Vec ftr = inst.F.transpose() * rate;
        const double residual = (inst.x - ftr).norm();
        const double coupling =
            (state.v - inst.F * state.u).lpNorm<Eigen::Infinity>();
        const double pinv_norm_v = factor.pinv_norm(state.v);
        const double violation =
            dual_feasibility_violation(inst, state.u, params.eta, params.mode);
        double conservation = -1.0;
        if (params.tau == 0.0)
            conservation = (state.v / t_dt - (fx - inst.F * ftr))
                               .lpNorm<Eigen::Infinity>();

        stats.max_coupling_defect = std::max(stats.max_coupling_defect, coupling);
        if (params.tau == 0.0)
            stats.max_conservation_defect =
                std::max(stats.max_conservation_defect, conservation);
        stats.max_pinv_norm_v = std::max(stats.max_pinv_norm_v, pinv_norm_v);
        stats.max_dual_violation = std::max(stats.max_dual_violation, violation);
        const double residual_rowspace =
            std::sqrt(std::max(0.0, residual * residual - off_rowspace_sq));
        stats.max_residual_time =
            std::max(stats.max_residual_time, residual_rowspace * t_dt);
        stats.max_dual_value = std::max(stats.max_dual_value, inst.x.dot(state.u));
        stats.final_residual = residual;
        stats.final_l1 = rate.lpNorm<1>();
        stats.steps = t;

        if (t % probe_every == 0) {
            TraceRow row;
            row.step = t;
            row.time = t_dt;
            row.residual_l2 = residual;
            row.l1_rate = rate.lpNorm<1>();
            row.cum_spikes = state.cum_spikes.lpNorm<1>();
            row.pinv_norm_v = pinv_norm_v;
            row.dual_violation = violation;
            row.conservation_defect = conservation;
            trace.rows.push_back(row);
            if (sink) sink(row);
        }
    }
    stats.total_spike_events = state.cum_spikes.lpNorm<1>();
    if (final_state) *final_state = state;
    return trace;
}

}  // namespace snn
