#include "sbench/cim.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace sbench {

void CimParams::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(pump))
        throw std::invalid_argument("CimParams: parameters must be finite");
    if (gamma < 0.0) std::cerr << "warning: CimParams gamma < 0, error gain ramps downward\n";
}

void CimFixedParams::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("CimFixedParams: dt must be positive");
    if (steps < 1) throw std::invalid_argument("CimFixedParams: steps must be >= 1");
    if (noise < 0.0) throw std::invalid_argument("CimFixedParams: noise must be nonnegative");
}

double modulate_target(double alpha, double rho, double delta, double d_h) {
    return alpha + rho * std::tanh(delta * d_h);
}

CimState cim_init(const IsingInstance& instance, const CimFixedParams& fixed, Rng& rng) {
    const int n = instance.n();
    CimState st;
    st.x.resize(n);
    st.e.assign(n, 1.0);
    for (int i = 0; i < n; ++i) st.x[i] = 0.1 * fixed.noise * rng.uniform(-1.0, 1.0);
    st.best_config = sign_config(st.x);
    st.best_energy = instance.energy(st.best_config);
    st.sign_energy = st.best_energy;
    return st;
}

bool cac_step(CimState& state, const IsingInstance& instance, const CimParams& params,
              const CimFixedParams& fixed, Rng& rng) {
    const int n = instance.n();
    if (static_cast<int>(state.x.size()) != n) throw dimension_error("cac_step: state dimension mismatch");

    const double d_h = state.sign_energy - state.best_energy;
    const double a = modulate_target(params.alpha, fixed.rho, fixed.delta, d_h);
    const double xi = std::max(0.0, params.gamma * (state.t - fixed.t_c));
    const double noise_amp = fixed.noise * std::sqrt(fixed.dt);

    std::vector<double> field(n, 0.0);
    for (const auto& c : instance.couplings()) {
        field[c.i] += c.value * state.x[c.j];
        field[c.j] += c.value * state.x[c.i];
    }

    bool ok = true;
    for (int i = 0; i < n; ++i) {
        const double x = state.x[i];
        const double dx = (params.pump - 1.0) * x - fixed.mu * x * x * x + params.beta * state.e[i] * field[i];
        const double de = -xi * (x * x - a) * state.e[i];
        double xn = x + fixed.dt * dx;
        if (noise_amp > 0.0) xn += noise_amp * rng.normal();
        state.x[i] = xn;
        state.e[i] += fixed.dt * de;
        if (!std::isfinite(xn) || std::abs(xn) > 10.0) ok = false;
    }
    state.t += fixed.dt;
    ++state.step;
    if (!ok) return false;

    const SpinConfig s = sign_config(state.x);
    state.sign_energy = instance.energy(s);
    if (state.sign_energy < state.best_energy) {
        state.best_energy = state.sign_energy;
        state.best_config = s;
        state.best_found_at = state.step;
    }
    return true;
}

SampleSet run_cim(const IsingInstance& instance, const CimParams& params,
                  const CimFixedParams& fixed, int shots, std::uint64_t seed) {
    params.validate();
    fixed.validate();
    if (shots < 1) throw std::invalid_argument("run_cim: shots must be >= 1");

    SampleSet set;
    set.instance_id = instance.id();
    set.solver_id = "cim-cac";
    set.params.solver_id = "cim-cac";
    set.params.values = {{"alpha", params.alpha},
                         {"beta", params.beta},
                         {"gamma", params.gamma},
                         {"pump", params.pump}};

    constexpr int kMaxRestarts = 3;
    for (int shot = 0; shot < shots; ++shot) {
        SampleRecord rec;
        rec.resource_cost = static_cast<double>(fixed.steps);

        double overall_best = std::numeric_limits<double>::infinity();
        SpinConfig overall_config;
        int overall_at = 0;
        bool diverged = true;

        for (int attempt = 0; attempt <= kMaxRestarts && diverged; ++attempt) {
            const std::uint64_t sub = mix_seed(seed, {static_cast<std::uint64_t>(shot),
                                                      static_cast<std::uint64_t>(attempt)});
            if (attempt == 0) rec.shot_seed = sub;
            Rng rng(sub);
            CimState st = cim_init(instance, fixed, rng);
            diverged = false;
            for (int k = 0; k < fixed.steps; ++k) {
                if (!cac_step(st, instance, params, fixed, rng)) {
                    diverged = true;
                    break;
                }
            }
            if (st.best_energy < overall_best) {
                overall_best = st.best_energy;
                overall_config = st.best_config;
                overall_at = st.best_found_at;
            }
        }

        rec.energy = overall_best;
        rec.config = std::move(overall_config);
        rec.best_found_at = overall_at;
        rec.diverged = diverged;
        set.records.push_back(std::move(rec));
    }
    set.total_resource = static_cast<double>(fixed.steps) * shots;
    return set;
}

}  // namespace sbench
