#include "snn/engine.hpp"

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "snn/errors.hpp"
#include "snn/harness.hpp"
#include "snn/io.hpp"
#include "snn/linalg.hpp"
#include "test_util.hpp"

using namespace snn;
using namespace snn::testutil;

namespace {

Instance one_neuron_instance() {
    Instance inst;
    inst.F = Mat::Ones(1, 1);
    inst.x = Vec::Ones(1) * 0.5;
    return inst;
}

SnnParams one_neuron_params(std::int64_t t_max) {
    SnnParams params;
    params.tau = 0.0;
    params.alpha = 1.0;
    params.eta = 1.0;
    params.dt = 0.1;
    params.mode = SpikeMode::Signed;
    params.t_max = t_max;
    return params;
}

// Literal round-by-round reference for the cascade, used as an oracle for
// the batched implementation.
void reference_step(SnnState& state, const Instance& inst, const SnnParams& params) {
    state.u += inst.x * params.dt;
    state.v += (inst.F * inst.x) * params.dt;
    if (params.tau > 0.0) {
        state.u *= 1.0 - params.tau * params.dt;
        state.v *= 1.0 - params.tau * params.dt;
    }
    for (long long round = 0; round < 1000000; ++round) {
        const Vec s = spike_vector(state.v, params.eta, params.mode);
        if ((s.array() == 0.0).all()) break;
        const Vec du = -params.alpha * (inst.F.transpose() * s);
        state.u += du;
        state.v += inst.F * du;
        state.cum_spikes += s;
        if (params.cascade == CascadePolicy::Once) break;
    }
    ++state.step;
}

}  // namespace

TEST_CASE("init starts from zero with exact coupling") {
    const Instance inst = three_neuron_instance();
    SnnParams params;
    const SnnState state = init(inst, params);
    CHECK(state.v.norm() == 0.0);
    CHECK(state.u.norm() == 0.0);
    CHECK(state.cum_spikes.norm() == 0.0);
    CHECK(state.step == 0);
    CHECK((state.v - inst.F * state.u).norm() == 0.0);
    CHECK_THROWS_AS(firing_rate(state, params), ZeroSteps);
}

TEST_CASE("spike_vector rule") {
    Vec v(3);
    v << 1.2, 0.5, -1.3;
    const Vec s_signed = spike_vector(v, 1.0, SpikeMode::Signed);
    CHECK(s_signed[0] == 1.0);
    CHECK(s_signed[1] == 0.0);
    CHECK(s_signed[2] == -1.0);
    const Vec s_nonneg = spike_vector(v, 1.0, SpikeMode::Nonneg);
    CHECK(s_nonneg[0] == 1.0);
    CHECK(s_nonneg[1] == 0.0);
    CHECK(s_nonneg[2] == 0.0);

    Vec at_threshold(1);
    at_threshold << 1.0;  // strictly greater than eta is required
    CHECK(spike_vector(at_threshold, 1.0, SpikeMode::Signed).norm() == 0.0);
    CHECK(spike_vector(at_threshold, 1.0, SpikeMode::Nonneg).norm() == 0.0);
}

TEST_CASE("one-neuron closed form with dyadic increments") {
    // dt = 0.125 keeps every increment exactly representable: v climbs by
    // 0.0625 per step, touches 1.0 exactly at step 16 without firing, and
    // completes the first spike at step 17.
    const Instance inst = one_neuron_instance();
    SnnParams params = one_neuron_params(2000);
    params.dt = 0.125;
    SnnState state = init(inst, params);

    for (int t = 1; t <= 16; ++t) {
        const StepEvent event = step(state, inst, params);
        CHECK(event.spike_events == 0.0);
        CHECK(state.v[0] == 0.0625 * t);
    }
    const StepEvent first_spike = step(state, inst, params);
    CHECK(first_spike.spike_events == 1.0);
    CHECK(state.v[0] == 0.0625);

    // one spike every 16 further steps
    int spikes = 0;
    for (int t = 18; t <= 177; ++t) {
        const StepEvent event = step(state, inst, params);
        if (event.spike_events > 0.0) ++spikes;
    }
    CHECK(spikes == 10);

    while (state.step < 2000) step(state, inst, params);
    const Vec rate = firing_rate(state, params);
    CHECK(rate[0] >= 0.49);
    CHECK(rate[0] <= 0.50);

    CHECK_THROWS_AS(step(state, inst, params), StepLimitExceeded);
}

TEST_CASE("one-neuron with dt=0.1: 20-step period, rate in [0.49, 0.50]") {
    // With dt = 0.1 the increment fl(0.05) is a shade above 0.05, so the
    // boundary step may fire one step early; the period and rate are exact.
    const Instance inst = one_neuron_instance();
    const SnnParams params = one_neuron_params(2000);
    SnnState state = init(inst, params);

    std::int64_t first_spike_step = 0;
    while (first_spike_step == 0) {
        const StepEvent event = step(state, inst, params);
        if (event.spike_events > 0.0) first_spike_step = state.step;
    }
    CHECK(first_spike_step >= 20);
    CHECK(first_spike_step <= 21);

    std::int64_t previous = first_spike_step;
    for (int count = 0; count < 9;) {
        const StepEvent event = step(state, inst, params);
        if (event.spike_events > 0.0) {
            CHECK(state.step - previous == 20);
            previous = state.step;
            ++count;
        }
    }

    while (state.step < 2000) step(state, inst, params);
    const Vec rate = firing_rate(state, params);
    CHECK(rate[0] >= 0.49);
    CHECK(rate[0] <= 0.50);
}

TEST_CASE("no spike means pure drift at tau 0") {
    const Instance inst = three_neuron_instance();
    SnnParams params;
    params.dt = 1e-3;
    params.eta = 10.0;  // nothing fires
    params.t_max = 5;
    SnnState state = init(inst, params);
    Vec expected = Vec::Zero(3);
    for (int t = 0; t < 5; ++t) {
        step(state, inst, params);
        expected += inst.F * inst.x * params.dt;
        CHECK((state.v - expected).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
}

TEST_CASE("firing rate arithmetic") {
    SnnParams params;
    params.alpha = 0.5;
    params.dt = 0.1;
    SnnState state;
    state.cum_spikes = (Vec(3) << 5.0, 0.0, 10.0).finished();
    state.step = 100;
    const Vec rate = firing_rate(state, params);
    CHECK(rate[0] == doctest::Approx(0.25));
    CHECK(rate[1] == doctest::Approx(0.0));
    CHECK(rate[2] == doctest::Approx(0.5));
}

TEST_CASE("conservation identity") {
    const Instance inst = one_neuron_instance();
    SUBCASE("exact at step 100 for the one-neuron run") {
        const SnnParams params = one_neuron_params(100);
        SnnState state = init(inst, params);
        while (state.step < 100) step(state, inst, params);
        CHECK(conservation_defect(state, inst, params) <= 1e-12);
    }
    SUBCASE("leaky runs are rejected") {
        SnnParams params = one_neuron_params(10);
        params.tau = 0.2;
        SnnState state = init(inst, params);
        step(state, inst, params);
        CHECK_THROWS_AS(conservation_defect(state, inst, params),
                        LeakyNotSupported);
    }
}

TEST_CASE("cascade=once fires each hot neuron a single round") {
    // alpha too small to clear the threshold in one round: exhaustive would
    // keep going, once-mode stops after a single sweep.
    const Instance inst = one_neuron_instance();
    SnnParams params = one_neuron_params(100);
    params.alpha = 0.01;
    params.cascade = CascadePolicy::Once;
    SnnState state = init(inst, params);
    while (spike_vector(state.v, params.eta, params.mode).norm() == 0.0 &&
           state.step < 50)
        step(state, inst, params);
    const double v_before = state.v[0];
    const StepEvent event = step(state, inst, params);
    CHECK(event.spike_events == 1.0);
    CHECK(event.cascade_rounds == 1);
    CHECK(state.v[0] == doctest::Approx(v_before + 0.05 - 0.01).epsilon(1e-12));
    CHECK(state.v[0] > params.eta);  // still hot; once-mode left it alone
}

TEST_CASE("cascade divergence on oversized alpha") {
    const Instance inst = one_neuron_instance();
    SnnParams params = one_neuron_params(100);
    params.alpha = 5.0;  // one spike overshoots through the mirror wall
    SnnState state = init(inst, params);
    CHECK_THROWS_AS(
        [&] {
            while (state.step < 100) step(state, inst, params);
        }(),
        CascadeDivergence);
}

TEST_CASE("batched cascade matches the literal round-by-round loop") {
    Rng rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(3));
        const int m = 1 + static_cast<int>(rng.below(2));
        Instance inst{gen_rsm(n, m, 50 + trial), rng.gaussian_vector(m)};
        SnnParams params;
        params.alpha = 0.01 + 0.1 * rng.uniform();  // small enough to batch
        params.eta = 1.0;
        params.dt = 0.05;
        params.tau = trial % 2 == 0 ? 0.0 : 0.4;
        params.mode = trial % 3 == 0 ? SpikeMode::Nonneg : SpikeMode::Signed;
        params.t_max = 300;

        SnnState batched = init(inst, params);
        SnnState reference = init(inst, params);
        const double fx_inf = (inst.F * inst.x).lpNorm<Eigen::Infinity>();
        for (int t = 0; t < 300; ++t) {
            step(batched, inst, params);
            reference_step(reference, inst, params);
            REQUIRE((batched.v - reference.v).lpNorm<Eigen::Infinity>() <= 1e-9);
            REQUIRE((batched.u - reference.u).lpNorm<Eigen::Infinity>() <= 1e-9);
            REQUIRE((batched.cum_spikes - reference.cum_spikes)
                        .lpNorm<Eigen::Infinity>() == 0.0);
            if (params.tau == 0.0)
                REQUIRE(conservation_defect(batched, inst, params) <=
                        1e-8 * (1.0 + fx_inf));
        }
    }
}

TEST_CASE("run: trace shape, coupling, conservation, determinism") {
    const Instance inst = three_neuron_instance();
    SnnParams params;
    params.eta = 2.0;
    params.dt = 1.0 / (24.0 * std::sqrt(15.0));
    params.t_max = 2000;

    SUBCASE("single-step trace has one row") {
        SnnParams tiny = params;
        tiny.t_max = 1;
        const Trace trace = run(inst, tiny, 1);
        CHECK(trace.rows.size() == 1);
        CHECK(trace.rows[0].step == 1);
    }

    const Trace trace = run(inst, params, 10);
    CHECK(trace.rows.size() == 200);
    CHECK(trace.stats.max_coupling_defect <= 1e-9);
    const double fx_inf = (inst.F * inst.x).lpNorm<Eigen::Infinity>();
    CHECK(trace.stats.max_conservation_defect <= 1e-8 * (1.0 + fx_inf));

    SUBCASE("residual envelope: min over trace bounded by first row") {
        double min_residual = trace.rows[0].residual_l2;
        for (const auto& row : trace.rows)
            min_residual = std::min(min_residual, row.residual_l2);
        CHECK(min_residual <= trace.rows[0].residual_l2);
    }

    SUBCASE("bit-identical reruns") {
        const Trace again = run(inst, params, 10);
        REQUIRE(again.rows.size() == trace.rows.size());
        for (std::size_t i = 0; i < trace.rows.size(); ++i) {
            CHECK(trace_row_to_csv(trace.rows[i]) ==
                  trace_row_to_csv(again.rows[i]));
        }
    }
}

TEST_CASE("three-neuron run converges to an exact representation") {
    const Instance inst = three_neuron_instance();
    const SnnParams params = auto_params(inst, Problem::nnls(), 20000);
    CHECK(params.eta == doctest::Approx(2.0).epsilon(1e-9));
    const Trace trace = run(inst, params, 100);
    CHECK(trace.stats.final_residual <= 0.05 * inst.x.norm());
}

TEST_CASE("potential bound and residual identity in the theorem regime") {
    Instance inst{gen_rsm(8, 3, 21), Vec(3)};
    {
        Rng rng(22);
        inst.x = rng.gaussian_vector(3);
    }
    const SnnParams params = auto_params(inst, Problem::nnls(), 4000);
    const GramFactor factor(inst.F);
    const SpectralData& sd = factor.spectral();
    const Vec x_f = factor.project_rowspace(inst.x);

    SnnState state = init(inst, params);
    const double cap =
        2.0 * std::sqrt(sd.kappa * params.eta * static_cast<double>(inst.n()));
    for (int t = 1; t <= 4000; ++t) {
        step(state, inst, params);
        const double pn = factor.pinv_norm(state.v);
        REQUIRE(pn <= cap);
        if (t % 500 == 0) {
            const Vec rate = firing_rate(state, params);
            const double lhs = (x_f - inst.F.transpose() * rate).norm();
            const double rhs = pn / (static_cast<double>(t) * params.dt);
            REQUIRE(close_rel(lhs, rhs, 1e-8));
        }
    }
}

TEST_CASE("coupling stays tight for leaky signed and nonneg runs") {
    Instance inst{gen_rsm(6, 2, 33), Vec(2)};
    {
        Rng rng(34);
        inst.x = rng.gaussian_vector(2);
    }
    for (const SpikeMode mode : {SpikeMode::Signed, SpikeMode::Nonneg}) {
        SnnParams params;
        params.tau = 0.1;
        params.alpha = 0.37;
        params.eta = 1.0;
        params.dt = 0.02;
        params.mode = mode;
        params.t_max = 3000;
        const Trace trace = run(inst, params, 50);
        CHECK(trace.stats.max_coupling_defect <= 1e-9);
        for (const auto& row : trace.rows)
            CHECK(row.conservation_defect == -1.0);  // not defined when leaky
    }
}
