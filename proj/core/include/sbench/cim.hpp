#pragma once

#include <cstdint>
#include <vector>

#include "sbench/model.hpp"
#include "sbench/rng.hpp"

namespace sbench {

// Tunable CIM-CAC parameters.
struct CimParams {
    double alpha = 0.25;  // target amplitude baseline
    double beta = 0.0020; // coupling strength
    double gamma = 0.08;  // ramp rate of the error gain xi
    double pump = -10.0;  // pump schedule parameter R

    void validate() const;
};

// Fixed integration constants (nominal values overridable by config).
struct CimFixedParams {
    double dt = 0.00625;
    double mu = 0.5;
    double rho = 5.0;
    double delta = 10.0;
    double noise = 0.5;
    int steps = 5000;
    double t_c = 0.0;  // ramp onset time

    void validate() const;
};

struct CimState {
    std::vector<double> x;  // oscillator amplitudes
    std::vector<double> e;  // auxiliary error variables
    double t = 0.0;
    int step = 0;
    double best_energy = 0.0;
    SpinConfig best_config;
    int best_found_at = 0;
    double sign_energy = 0.0;  // energy(sign(x)) of the current state
};

// Squared target oscillation amplitude a = alpha + rho * tanh(delta * dH).
double modulate_target(double alpha, double rho, double delta, double d_h);

CimState cim_init(const IsingInstance& instance, const CimFixedParams& fixed, Rng& rng);

// One explicit Euler(-Maruyama) step. Both derivatives are evaluated at the
// pre-step state; dH is energy(sign(x)) - best_energy. Returns false on
// divergence (NaN or |x_i| > 10).
bool cac_step(CimState& state, const IsingInstance& instance, const CimParams& params,
              const CimFixedParams& fixed, Rng& rng);

// `shots` independent integrations of `steps` steps each; resource_cost per
// shot is `steps` step units. Diverged shots restart with a fresh substream
// seed (at most 3 restarts) and are flagged if divergence persists.
SampleSet run_cim(const IsingInstance& instance, const CimParams& params,
                  const CimFixedParams& fixed, int shots, std::uint64_t seed);

}  // namespace sbench
