#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sbench/profiles.hpp"
#include "sbench/rng.hpp"

namespace sbench {

// Exploration-exploitation meta-parameters.
struct MetaParams {
    double explore_frac = 0.25;  // fraction of the budget spent exploring
    double tau = 1.0;            // resource spent per explored setting

    void validate() const;
    bool operator==(const MetaParams&) const = default;
    bool operator<(const MetaParams& o) const {
        return std::tie(explore_frac, tau) < std::tie(o.explore_frac, o.tau);
    }
};

struct StrategyPoint {
    double resource = 0.0;
    ParameterPoint params;
    double score = 0.0;
    bool needs_rerun = false;
};

// Resource -> (parameter point, expected score).
struct StrategyCurve {
    std::string kind;  // virtual-best | fixed | explore-exploit | meta
    bool actionable = false;
    std::vector<StrategyPoint> points;
};

struct SplitSpec {
    int split_id = 0;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::uint64_t seed = 0;
};

// ---- Virtual best ----

struct VirtualBestResult {
    // per instance: argmax parameter point per resource (provenance)
    std::map<std::string, StrategyCurve> per_instance_curve;
    // per instance: the corresponding max-estimate profile
    std::map<std::string, PerformanceProfile> per_instance_profile;
};

// Pointwise max over parameter points, per instance. Ties broken by
// lexicographically smallest parameter vector.
VirtualBestResult virtual_best(const std::vector<PerformanceProfile>& profiles);

// ---- Fixed parameter setting strategy ----

enum class FixedBestMode { ArgmaxOfAggregate, AverageOfArgmax };

// Derives one parameter choice per resource from the training profiles.
// ArgmaxOfAggregate picks the evaluated point maximizing the mean train
// profile; AverageOfArgmax averages each parameter's per-instance best value
// and flags points absent from the evaluated set as needs_rerun.
StrategyCurve fixed_best(const std::vector<PerformanceProfile>& train_profiles, FixedBestMode mode);

// ---- Explore-exploit ----

struct DistUniform { double lo, hi; };
struct DistLogUniform { double lo, hi; };
struct DistRoundUniform { double lo, hi; };
struct DistTruncNormal { double mean, sd, min, max; };
using ParamDist = std::variant<DistUniform, DistLogUniform, DistRoundUniform, DistTruncNormal>;

double sample_dist(const ParamDist& dist, Rng& rng);

struct SearchSpace {
    std::string solver_id;
    std::map<std::string, ParamDist> dists;
    std::map<std::string, double> nominal;  // fallback point for degenerate budgets

    ParameterPoint sample(Rng& rng) const;
    ParameterPoint nominal_point() const;
};

// evaluate(point, resource) -> observed score from actually running the
// solver (or a mock in tests).
using EvaluateFn = std::function<double(const ParameterPoint&, double resource)>;

struct ExploreExploitResult {
    // (cumulative resource spent, best-so-far observed score)
    std::vector<std::pair<double, double>> trajectory;
    ParameterPoint chosen;
    bool degenerate = false;
    int explored = 0;
};

// K = floor(explore_frac*B/tau) candidates at tau each, then the incumbent
// at the remaining B - K*tau. Exploration spending is charged to the
// trajectory. K = 0 degenerates to the nominal point at full budget.
ExploreExploitResult explore_exploit(double budget, const MetaParams& meta,
                                     const SearchSpace& space, const EvaluateFn& evaluate,
                                     std::uint64_t seed);

// Step-function lookup: best-so-far score at cumulative resource r
// (0 before the first completed evaluation).
double trajectory_value_at(const std::vector<std::pair<double, double>>& trajectory, double r);

// ---- Meta sweep ----

struct MetaSweepResult {
    StrategyCurve best;        // per resource, the argmax meta point
    StrategyCurve actionable;  // smoothed version
    // mean trajectory value per grid point for every meta cell
    std::map<MetaParams, std::vector<double>> mean_scores;
};

// Runs explore_exploit for every (meta cell, train instance, repetition),
// averages the best-so-far trajectories onto the grid and reports the
// argmax meta point per resource.
MetaSweepResult meta_sweep(
    const std::vector<MetaParams>& meta_grid, const ResourceGrid& grid,
    const std::vector<std::string>& train_ids, int n_rep, std::uint64_t seed,
    const std::function<ExploreExploitResult(const std::string& instance_id, const MetaParams&,
                                             double budget, std::uint64_t seed)>& run_ee,
    int smooth_window = 5);

// ---- Smoothing ----

enum class FitFamily { None, Constant, LinearInLogResource, PowerLaw };

// Per-parameter rolling median (window shrunk symmetrically at the ends),
// optionally replaced by a least-squares fit. Points absent from
// `evaluated` (when provided) are flagged needs_rerun.
StrategyCurve smooth_curve(const StrategyCurve& curve, int window,
                           FitFamily fit = FitFamily::None,
                           const std::vector<ParameterPoint>* evaluated = nullptr);

// ---- Cross-validation ----

// Seeded shuffled splits; |train| = round(train_frac * |ids|).
std::vector<SplitSpec> make_splits(const std::vector<std::string>& ids, int n_splits,
                                   double train_frac, std::uint64_t seed);

// Pools per-test-instance profiles across splits and aggregates them with a
// percentile bootstrap over the pooled split x instance axis.
PerformanceProfile cross_validate(
    const std::vector<SplitSpec>& splits, Statistic statistic, int n_boot, double confidence,
    std::uint64_t seed,
    const std::function<std::vector<PerformanceProfile>(const SplitSpec&)>& eval_test_profiles);

// Profile of a fixed curve on one instance: the instance's evaluated profile
// value at the curve's parameter point per resource. Throws if a point is
// not in the instance's evaluated set.
PerformanceProfile apply_curve(const StrategyCurve& curve,
                               const std::vector<PerformanceProfile>& instance_profiles);

// CSV persistence: strategy, resource, param:<name>..., estimate, ci_low,
// ci_high, needs_rerun. (ci columns written as the estimate when the curve
// carries no band.)
void write_strategy_csv(const StrategyCurve& curve, const std::filesystem::path& path);

}  // namespace sbench
