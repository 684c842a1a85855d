#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sbench/model.hpp"

namespace sbench {

class degenerate_instance_error : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Strictly ascending resource checkpoints r_0 .. r_f.
struct ResourceGrid {
    std::vector<double> values;

    void validate() const;
    double r_f() const { return values.back(); }
    static ResourceGrid log_spaced(double r0, double rf, int points = 20);

    bool operator==(const ResourceGrid&) const = default;
};

struct ProfilePoint {
    double resource = 0.0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n_boot = 0;
};

// Expected performance score vs resource, with bootstrap confidence band.
struct PerformanceProfile {
    std::string instance_id;
    std::string solver_id;
    ParameterPoint params;
    std::vector<ProfilePoint> points;

    ResourceGrid grid() const;
};

// (best_found - random) / (optimal - random); 1 = optimal, 0 = random-level.
double performance_score(double best_found, double optimal, double random_base);

// Bootstrap regeneration of the full profile from the r_f sample pool:
// for each grid point, k(r) = max(1, floor(r / mean shot cost)) per-shot best
// energies are drawn with replacement and scored by the minimum of the draw.
PerformanceProfile bootstrap_profile(const SampleSet& pool, const ResourceGrid& grid, int n_boot,
                                     double confidence, double optimal_energy, double random_base,
                                     std::uint64_t seed);
// Convenience overload: optimal from the planted ground energy, random
// baseline analytic.
PerformanceProfile bootstrap_profile(const SampleSet& pool, const ResourceGrid& grid, int n_boot,
                                     double confidence, const IsingInstance& instance,
                                     std::uint64_t seed);

enum class Statistic { Mean, Median };

// Pointwise statistic across instance profiles; CI by resampling the
// instance axis with replacement.
PerformanceProfile aggregate_instances(const std::vector<PerformanceProfile>& profiles,
                                       Statistic statistic, int n_boot, double confidence,
                                       std::uint64_t seed);

// Linear-interpolation percentile of a sorted-on-demand sample.
double percentile(std::vector<double> values, double q);

// CSV persistence: instance_id, solver_id, param_hash, resource, estimate,
// ci_low, ci_high, n_boot.
void write_profiles_csv(const std::vector<PerformanceProfile>& profiles,
                        const std::filesystem::path& path);
std::vector<PerformanceProfile> read_profiles_csv(const std::filesystem::path& path,
                                                  const std::vector<ParameterPoint>& known_params);

}  // namespace sbench
