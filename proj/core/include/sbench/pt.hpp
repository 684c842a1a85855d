#pragma once

#include <cstdint>
#include <vector>

#include "sbench/model.hpp"
#include "sbench/rng.hpp"

namespace sbench {

// Parallel tempering parameters as exposed to the benchmark: replica count,
// sweep count, and the two spin-flip probabilities that encode the
// temperature bounds.
struct PtParams {
    int n_replicas = 1;
    int sweeps = 1;
    double p_cold = 0.1;
    double p_hot = 0.5;

    void validate() const;
};

struct TemperatureBounds {
    double t_min = 0.0;
    double t_max = 0.0;
    bool swapped = false;  // true if t_max < t_min had to be repaired
};

// Maps (p_cold, p_hot) to (T_min, T_max) through the minimal / maximal
// spin-flip gaps of the coupling matrix:
//   T_min = dE_cold / ln(N_min_gap / p_cold),  dE_cold = min_i 2 min_{j|J_ij!=0} |J_ij|
//   T_max = dE_hot  / ln(1 / p_hot),           dE_hot  = 2 max_i sum_j |J_ij|
TemperatureBounds derive_temperatures(const IsingInstance& instance, double p_cold, double p_hot);

// Geometric ladder between the bounds; [t_min] when n_replicas == 1.
std::vector<double> temperature_ladder(double t_min, double t_max, int n_replicas);

// One Metropolis pass over all spins in index order; returns the updated
// running energy. Flips accepted with probability min(1, exp(-delta/T)).
double metropolis_sweep(const IsingInstance& instance, SpinConfig& config, double temperature,
                        Rng& rng, double current_energy);

// Acceptance probability for exchanging configurations between two
// temperature slots: min(1, exp((1/T_a - 1/T_b)(E_a - E_b))).
double replica_swap_probability(double t_a, double t_b, double e_a, double e_b);

// Full run: `shots` independent repetitions, each n_replicas chains for
// `sweeps` rounds with alternating even/odd adjacent swap passes.
// resource_cost per shot is n_replicas * sweeps sweep units.
SampleSet run_pt(const IsingInstance& instance, const PtParams& params, int shots, std::uint64_t seed);

// Clamps sampled probability parameters into the numerically safe open
// interval (1e-6, 1-1e-6).
double clamp_probability(double p);

}  // namespace sbench
