#include "sbench/pt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbench {

void PtParams::validate() const {
    if (n_replicas < 1) throw std::invalid_argument("PtParams: n_replicas must be >= 1");
    if (sweeps < 1) throw std::invalid_argument("PtParams: sweeps must be >= 1");
    if (!(p_cold > 0.0 && p_cold < 1.0)) throw std::invalid_argument("PtParams: p_cold must be in (0,1)");
    if (!(p_hot > 0.0 && p_hot < 1.0)) throw std::invalid_argument("PtParams: p_hot must be in (0,1)");
}

double clamp_probability(double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); }

TemperatureBounds derive_temperatures(const IsingInstance& instance, double p_cold, double p_hot) {
    double de_cold = std::numeric_limits<double>::infinity();
    double de_hot = 0.0;
    int n_min_gap = 0;
    bool any_coupling = false;
    for (int i = 0; i < instance.n(); ++i) {
        const auto& nbrs = instance.adjacency()[i];
        double min_abs = std::numeric_limits<double>::infinity();
        double sum_abs = 0.0;
        for (const auto& [j, v] : nbrs) {
            if (v == 0.0) continue;
            min_abs = std::min(min_abs, std::abs(v));
            sum_abs += std::abs(v);
        }
        de_hot = std::max(de_hot, 2.0 * sum_abs);
        if (!std::isfinite(min_abs)) continue;  // isolated spin
        any_coupling = true;
        const double de_i = 2.0 * min_abs;
        if (de_i < de_cold) {
            de_cold = de_i;
            n_min_gap = 1;
        } else if (de_i == de_cold) {
            ++n_min_gap;
        }
    }
    if (!any_coupling) throw std::invalid_argument("derive_temperatures: instance has no nonzero coupling");
    if (!(p_cold > 0.0) || p_cold >= n_min_gap)
        throw std::invalid_argument("derive_temperatures: p_cold must be in (0, N_min_gap)");
    if (!(p_hot > 0.0) || p_hot >= 1.0)
        throw std::invalid_argument("derive_temperatures: p_hot must be in (0, 1)");

    TemperatureBounds b;
    b.t_min = de_cold / std::log(n_min_gap / p_cold);
    b.t_max = de_hot / std::log(1.0 / p_hot);
    if (b.t_max < b.t_min) {
        std::swap(b.t_min, b.t_max);
        b.swapped = true;
    }
    return b;
}

std::vector<double> temperature_ladder(double t_min, double t_max, int n_replicas) {
    if (!(t_min > 0.0) || t_max < t_min) throw std::invalid_argument("temperature_ladder: need 0 < t_min <= t_max");
    if (n_replicas < 1) throw std::invalid_argument("temperature_ladder: n_replicas must be >= 1");
    std::vector<double> ladder(n_replicas);
    if (n_replicas == 1) {
        ladder[0] = t_min;
        return ladder;
    }
    const double ratio = t_max / t_min;
    for (int k = 0; k < n_replicas; ++k)
        ladder[k] = t_min * std::pow(ratio, static_cast<double>(k) / (n_replicas - 1));
    ladder.front() = t_min;
    ladder.back() = t_max;
    return ladder;
}

double metropolis_sweep(const IsingInstance& instance, SpinConfig& config, double temperature,
                        Rng& rng, double current_energy) {
    if (!(temperature > 0.0)) throw std::invalid_argument("metropolis_sweep: temperature must be positive");
    for (int i = 0; i < instance.n(); ++i) {
        const double delta = instance.delta_energy(config, i);
        if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temperature)) {
            config.spins[i] = static_cast<std::int8_t>(-config.spins[i]);
            current_energy += delta;
        }
    }
    return current_energy;
}

double replica_swap_probability(double t_a, double t_b, double e_a, double e_b) {
    const double exponent = (1.0 / t_a - 1.0 / t_b) * (e_a - e_b);
    return std::min(1.0, std::exp(exponent));
}

SampleSet run_pt(const IsingInstance& instance, const PtParams& params, int shots, std::uint64_t seed) {
    params.validate();
    if (shots < 1) throw std::invalid_argument("run_pt: shots must be >= 1");

    const TemperatureBounds bounds = derive_temperatures(instance, params.p_cold, params.p_hot);
    const std::vector<double> ladder = temperature_ladder(bounds.t_min, bounds.t_max, params.n_replicas);
    const int n = instance.n();
    const double shot_cost = static_cast<double>(params.n_replicas) * params.sweeps;

    SampleSet set;
    set.instance_id = instance.id();
    set.solver_id = "pt";
    set.params.solver_id = "pt";
    set.params.values = {{"n_replicas", static_cast<double>(params.n_replicas)},
                         {"sweeps", static_cast<double>(params.sweeps)},
                         {"p_cold", params.p_cold},
                         {"p_hot", params.p_hot}};

    for (int shot = 0; shot < shots; ++shot) {
        const std::uint64_t shot_seed = mix_seed(seed, static_cast<std::uint64_t>(shot));
        Rng rng(shot_seed);

        std::vector<SpinConfig> replicas(params.n_replicas);
        std::vector<double> energies(params.n_replicas);
        for (int k = 0; k < params.n_replicas; ++k) {
            replicas[k].spins.resize(n);
            for (int i = 0; i < n; ++i) replicas[k].spins[i] = rng.bernoulli(0.5) ? 1 : -1;
            energies[k] = instance.energy(replicas[k]);
        }

        SampleRecord best;
        best.shot_seed = shot_seed;
        best.resource_cost = shot_cost;
        best.best_found_at = 0;
        {
            const auto it = std::min_element(energies.begin(), energies.end());
            const int k = static_cast<int>(it - energies.begin());
            best.config = replicas[k];
            best.energy = instance.energy(replicas[k]);
        }

        for (int round = 1; round <= params.sweeps; ++round) {
            for (int k = 0; k < params.n_replicas; ++k)
                energies[k] = metropolis_sweep(instance, replicas[k], ladder[k], rng, energies[k]);

            // Alternating even/odd adjacent swap pass.
            const int start = (round % 2 == 1) ? 0 : 1;
            for (int k = start; k + 1 < params.n_replicas; k += 2) {
                const double p = replica_swap_probability(ladder[k], ladder[k + 1], energies[k], energies[k + 1]);
                if (rng.uniform01() < p) {
                    std::swap(replicas[k], replicas[k + 1]);
                    std::swap(energies[k], energies[k + 1]);
                }
            }

            const auto it = std::min_element(energies.begin(), energies.end());
            if (*it < best.energy) {
                const int k = static_cast<int>(it - energies.begin());
                const double exact = instance.energy(replicas[k]);  // resync running-energy drift
                if (exact < best.energy) {
                    best.config = replicas[k];
                    best.energy = exact;
                    best.best_found_at = round;
                }
            }
        }
        set.records.push_back(std::move(best));
    }
    set.total_resource = shot_cost * shots;
    return set;
}

}  // namespace sbench
