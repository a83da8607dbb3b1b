#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "snn/problems.hpp"

namespace snn {

enum class CascadePolicy { Once, Exhaustive };

struct SnnParams {
    double tau = 0.0;     // leak rate per unit time (0 = non-leaky)
    double alpha = 1.0;   // spike strength
    double eta = 1.0;     // firing threshold
    double dt = 1e-2;     // step size
    SpikeMode mode = SpikeMode::Signed;
    CascadePolicy cascade = CascadePolicy::Exhaustive;
    std::int64_t t_max = 10000;

    void validate() const;
};

struct SnnState {
    Vec v;           // membrane potentials, length n
    Vec u;           // dual iterate, length m; v = F u at step boundaries
    Vec cum_spikes;  // signed cumulative spike counts, integer valued
    std::int64_t step = 0;
};

struct StepEvent {
    // Sign indicator of the neurons that fired at least once this step.
    Vec spikes;
    // Number of cascade sweeps, i.e. distinct spike patterns applied. A
    // sweep that repeats k identical rounds counts once here; the repeat
    // count shows up in cum_spikes.
    int cascade_rounds = 0;
    // Total +-1 spike events across the whole step.
    double spike_events = 0.0;
};

struct TraceRow {
    std::int64_t step = 0;
    double time = 0.0;
    double residual_l2 = 0.0;
    double l1_rate = 0.0;
    double cum_spikes = 0.0;  // total spike events so far
    double pinv_norm_v = 0.0;
    double dual_violation = 0.0;
    double conservation_defect = 0.0;  // -1 when leaky (identity undefined)
};

// Worst-case margins tracked at every step boundary of a run.
struct RunStats {
    double max_coupling_defect = 0.0;       // ||v - F u||_inf
    double max_conservation_defect = 0.0;   // only accumulated when tau == 0
    double max_pinv_norm_v = 0.0;
    double max_dual_violation = 0.0;
    double max_residual_time = 0.0;         // max of ||x_F - F^T r|| * t * dt
    double max_dual_value = 0.0;            // max over steps of x^T u
    double final_residual = 0.0;
    double final_l1 = 0.0;
    double total_spike_events = 0.0;
    std::int64_t steps = 0;
};

struct Trace {
    std::vector<TraceRow> rows;
    RunStats stats;
};

SnnState init(const Instance& inst, const SnnParams& params);

// Spike rule. Signed: s_i = sign(v_i) if |v_i| > eta; nonneg: s_i = 1 if
// v_i > eta. Strictly greater in both modes.
Vec spike_vector(const Vec& v, double eta, SpikeMode mode);

// One discrete step: input, leak, spike cascade. Throws CascadeDivergence
// when the cascade does not settle, StepLimitExceeded at t_max.
StepEvent step(SnnState& state, const Instance& inst, const SnnParams& params);

// r(t) = alpha * cum_spikes / (step * dt)
Vec firing_rate(const SnnState& state, const SnnParams& params);

// || (v(t) - v(0)) / (t dt) - (F x - F F^T r(t)) ||_inf with v(0) = 0.
// Only defined for non-leaky runs.
double conservation_defect(const SnnState& state, const Instance& inst,
                           const SnnParams& params);

using RowSink = std::function<void(const TraceRow&)>;

// Runs the dynamics to t_max, probing every probe_every steps. Worst-case
// margins in Trace::stats are tracked at every step regardless of
// probe_every. An optional sink receives each probed row as it is produced;
// final_state, when given, receives the end-of-run state.
Trace run(const Instance& inst, const SnnParams& params, std::int64_t probe_every,
          const RowSink& sink = nullptr, SnnState* final_state = nullptr);

}  // namespace snn
