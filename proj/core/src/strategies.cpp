#include "sbench/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "sbench/io.hpp"

namespace sbench {

void MetaParams::validate() const {
    if (!(explore_frac > 0.0 && explore_frac <= 1.0))
        throw std::invalid_argument("MetaParams: explore_frac must be in (0,1]");
    if (!(tau > 0.0)) throw std::invalid_argument("MetaParams: tau must be positive");
}

// ---- Virtual best ----

namespace {

void check_common_grid(const std::vector<PerformanceProfile>& profiles) {
    if (profiles.empty()) throw std::invalid_argument("empty profile set");
    const ResourceGrid g = profiles.front().grid();
    for (const auto& p : profiles)
        if (!(p.grid() == g)) throw std::invalid_argument("profiles do not share a resource grid");
}

std::map<std::string, std::vector<const PerformanceProfile*>> group_by_instance(
    const std::vector<PerformanceProfile>& profiles) {
    std::map<std::string, std::vector<const PerformanceProfile*>> by_inst;
    for (const auto& p : profiles) by_inst[p.instance_id].push_back(&p);
    return by_inst;
}

}  // namespace

VirtualBestResult virtual_best(const std::vector<PerformanceProfile>& profiles) {
    check_common_grid(profiles);
    const ResourceGrid grid = profiles.front().grid();

    VirtualBestResult res;
    for (auto& [inst, plist] : group_by_instance(profiles)) {
        StrategyCurve curve;
        curve.kind = "virtual-best";
        PerformanceProfile prof;
        prof.instance_id = inst;
        prof.solver_id = plist.front()->solver_id;
        prof.params.solver_id = "virtual-best";

        for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
            const PerformanceProfile* best = nullptr;
            for (const auto* p : plist) {
                if (!best || p->points[gi].estimate > best->points[gi].estimate ||
                    (p->points[gi].estimate == best->points[gi].estimate && p->params < best->params))
                    best = p;
            }
            StrategyPoint sp;
            sp.resource = grid.values[gi];
            sp.params = best->params;
            sp.score = best->points[gi].estimate;
            curve.points.push_back(std::move(sp));
            prof.points.push_back(best->points[gi]);
        }
        res.per_instance_curve[inst] = std::move(curve);
        res.per_instance_profile[inst] = std::move(prof);
    }
    return res;
}

// ---- Fixed best ----

StrategyCurve fixed_best(const std::vector<PerformanceProfile>& train_profiles, FixedBestMode mode) {
    check_common_grid(train_profiles);
    const ResourceGrid grid = train_profiles.front().grid();
    auto by_inst = group_by_instance(train_profiles);
    if (by_inst.empty()) throw std::invalid_argument("fixed_best: empty train set");

    // evaluated parameter points, sorted for deterministic ties
    std::set<ParameterPoint> evaluated;
    for (const auto& p : train_profiles) evaluated.insert(p.params);

    StrategyCurve curve;
    curve.kind = "fixed";

    if (mode == FixedBestMode::ArgmaxOfAggregate) {
        for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
            std::optional<ParameterPoint> best_p;
            double best_score = -std::numeric_limits<double>::infinity();
            for (const auto& cand : evaluated) {
                double sum = 0.0;
                std::size_t count = 0;
                for (auto& [inst, plist] : by_inst) {
                    for (const auto* p : plist) {
                        if (p->params == cand) {
                            sum += p->points[gi].estimate;
                            ++count;
                        }
                    }
                }
                if (count == 0) continue;
                const double mean = sum / count;
                if (mean > best_score || (mean == best_score && best_p && cand < *best_p)) {
                    best_score = mean;
                    best_p = cand;
                }
            }
            StrategyPoint sp;
            sp.resource = grid.values[gi];
            sp.params = *best_p;
            sp.score = best_score;
            curve.points.push_back(std::move(sp));
        }
        return curve;
    }

    // AverageOfArgmax
    const VirtualBestResult vb = virtual_best(train_profiles);
    for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
        ParameterPoint avg;
        double score_sum = 0.0;
        std::size_t count = 0;
        for (auto& [inst, c] : vb.per_instance_curve) {
            const StrategyPoint& sp = c.points[gi];
            avg.solver_id = sp.params.solver_id;
            for (const auto& [name, value] : sp.params.values) avg.values[name] += value;
            score_sum += sp.score;
            ++count;
        }
        for (auto& [name, value] : avg.values) value /= static_cast<double>(count);
        StrategyPoint sp;
        sp.resource = grid.values[gi];
        sp.params = avg;
        sp.score = score_sum / count;  // optimistic until rerun
        sp.needs_rerun = evaluated.find(avg) == evaluated.end();
        curve.points.push_back(std::move(sp));
    }
    return curve;
}

// ---- Explore-exploit ----

double sample_dist(const ParamDist& dist, Rng& rng) {
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DistUniform>) {
                return rng.uniform(d.lo, d.hi);
            } else if constexpr (std::is_same_v<T, DistLogUniform>) {
                return std::exp(rng.uniform(std::log(d.lo), std::log(d.hi)));
            } else if constexpr (std::is_same_v<T, DistRoundUniform>) {
                return std::round(rng.uniform(d.lo, d.hi));
            } else {
                for (int tries = 0; tries < 1000; ++tries) {
                    const double v = d.mean + d.sd * rng.normal();
                    if (v >= d.min && v <= d.max) return v;
                }
                return std::clamp(d.mean, d.min, d.max);
            }
        },
        dist);
}

ParameterPoint SearchSpace::sample(Rng& rng) const {
    ParameterPoint p;
    p.solver_id = solver_id;
    for (const auto& [name, dist] : dists) p.values[name] = sample_dist(dist, rng);
    return p;
}

ParameterPoint SearchSpace::nominal_point() const {
    ParameterPoint p;
    p.solver_id = solver_id;
    p.values = nominal;
    return p;
}

ExploreExploitResult explore_exploit(double budget, const MetaParams& meta,
                                     const SearchSpace& space, const EvaluateFn& evaluate,
                                     std::uint64_t seed) {
    if (!(budget > 0.0)) throw std::invalid_argument("explore_exploit: budget must be positive");
    meta.validate();

    ExploreExploitResult res;
    const long long k = static_cast<long long>(std::floor(meta.explore_frac * budget / meta.tau));
    if (k == 0) {
        res.degenerate = true;
        res.chosen = space.nominal_point();
        const double score = evaluate(res.chosen, budget);
        res.trajectory.emplace_back(budget, score);
        return res;
    }
    res.explored = static_cast<int>(k);

    Rng rng(seed);
    double cum = 0.0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (long long i = 0; i < k; ++i) {
        const ParameterPoint cand = space.sample(rng);
        const double score = evaluate(cand, meta.tau);
        cum += meta.tau;
        if (score > best_score) {  // ties keep the earliest incumbent
            best_score = score;
            res.chosen = cand;
        }
        res.trajectory.emplace_back(cum, best_score);
    }
    const double remaining = budget - static_cast<double>(k) * meta.tau;
    if (remaining > 0.0) {
        const double score = evaluate(res.chosen, remaining);
        res.trajectory.emplace_back(budget, std::max(best_score, score));
    }
    return res;
}

double trajectory_value_at(const std::vector<std::pair<double, double>>& trajectory, double r) {
    double value = 0.0;  // random-level before anything completes
    for (const auto& [res, score] : trajectory) {
        if (res <= r * (1.0 + 1e-12)) value = score;
        else break;
    }
    return value;
}

// ---- Meta sweep ----

MetaSweepResult meta_sweep(
    const std::vector<MetaParams>& meta_grid, const ResourceGrid& grid,
    const std::vector<std::string>& train_ids, int n_rep, std::uint64_t seed,
    const std::function<ExploreExploitResult(const std::string&, const MetaParams&, double,
                                             std::uint64_t)>& run_ee,
    int smooth_window) {
    if (meta_grid.empty()) throw std::invalid_argument("meta_sweep: empty meta grid");
    if (train_ids.empty()) throw std::invalid_argument("meta_sweep: no training instances");
    if (n_rep < 1) throw std::invalid_argument("meta_sweep: n_rep must be >= 1");
    grid.validate();

    MetaSweepResult out;
    const double budget = grid.r_f();
    for (std::size_t mi = 0; mi < meta_grid.size(); ++mi) {
        const MetaParams& meta = meta_grid[mi];
        std::vector<double> acc(grid.values.size(), 0.0);
        std::size_t runs = 0;
        for (std::size_t ii = 0; ii < train_ids.size(); ++ii) {
            for (int rep = 0; rep < n_rep; ++rep) {
                const std::uint64_t sub = mix_seed(seed, {mi, ii, static_cast<std::uint64_t>(rep)});
                const ExploreExploitResult ee = run_ee(train_ids[ii], meta, budget, sub);
                for (std::size_t gi = 0; gi < grid.values.size(); ++gi)
                    acc[gi] += trajectory_value_at(ee.trajectory, grid.values[gi]);
                ++runs;
            }
        }
        for (auto& v : acc) v /= static_cast<double>(runs);
        out.mean_scores[meta] = std::move(acc);
    }

    out.best.kind = "meta";
    for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
        const MetaParams* best = nullptr;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const auto& [meta, scores] : out.mean_scores) {
            if (scores[gi] > best_score) {
                best_score = scores[gi];
                best = &meta;
            }
        }
        StrategyPoint sp;
        sp.resource = grid.values[gi];
        sp.params.solver_id = "meta";
        sp.params.values = {{"explore_frac", best->explore_frac}, {"tau", best->tau}};
        sp.score = best_score;
        out.best.points.push_back(std::move(sp));
    }

    std::vector<ParameterPoint> evaluated;
    for (const auto& meta : meta_grid) {
        ParameterPoint p;
        p.solver_id = "meta";
        p.values = {{"explore_frac", meta.explore_frac}, {"tau", meta.tau}};
        evaluated.push_back(std::move(p));
    }
    out.actionable = smooth_curve(out.best, smooth_window, FitFamily::None, &evaluated);
    out.actionable.kind = "meta";
    return out;
}

// ---- Smoothing ----

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void fit_series(std::vector<double>& values, const std::vector<double>& resources, FitFamily fit) {
    const std::size_t n = values.size();
    if (fit == FitFamily::Constant) {
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        std::fill(values.begin(), values.end(), mean);
        return;
    }
    // Linear least squares on transformed coordinates.
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = std::log(resources[i]);
    if (fit == FitFamily::LinearInLogResource) {
        ys = values;
    } else {  // PowerLaw: value = A * r^B, fit ln(value) when all positive
        for (std::size_t i = 0; i < n; ++i) {
            if (!(values[i] > 0.0)) {
                std::cerr << "warning: power-law fit skipped, nonpositive values\n";
                return;
            }
            ys[i] = std::log(values[i]);
        }
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double intercept = my - slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = intercept + slope * xs[i];
        values[i] = fit == FitFamily::LinearInLogResource ? y : std::exp(y);
    }
}

}  // namespace

StrategyCurve smooth_curve(const StrategyCurve& curve, int window, FitFamily fit,
                           const std::vector<ParameterPoint>* evaluated) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("smooth_curve: window must be odd and >= 1");
    const int n = static_cast<int>(curve.points.size());
    if (n == 0) return curve;
    if (window > n) {
        std::cerr << "warning: smoothing window " << window << " clamped to curve length " << n << "\n";
        window = n % 2 == 1 ? n : n - 1;
        if (window < 1) window = 1;
    }

    std::vector<double> resources(n);
    for (int i = 0; i < n; ++i) resources[i] = curve.points[i].resource;

    StrategyCurve out = curve;
    out.actionable = true;
    const int half = window / 2;
    std::set<std::string> names;
    for (const auto& p : curve.points)
        for (const auto& [name, _] : p.params.values) names.insert(name);

    for (const auto& name : names) {
        std::vector<double> series(n), smoothed(n);
        for (int i = 0; i < n; ++i) series[i] = curve.points[i].params.values.at(name);
        for (int i = 0; i < n; ++i) {
            const int h = std::min({half, i, n - 1 - i});  // shrunken symmetric window
            smoothed[i] = median_of(std::vector<double>(series.begin() + (i - h),
                                                        series.begin() + (i + h + 1)));
        }
        if (fit != FitFamily::None) fit_series(smoothed, resources, fit);
        for (int i = 0; i < n; ++i) out.points[i].params.values[name] = smoothed[i];
    }

    if (evaluated) {
        for (auto& p : out.points)
            p.needs_rerun =
                std::find(evaluated->begin(), evaluated->end(), p.params) == evaluated->end();
    }
    return out;
}

// ---- Cross-validation ----

std::vector<SplitSpec> make_splits(const std::vector<std::string>& ids, int n_splits,
                                   double train_frac, std::uint64_t seed) {
    if (ids.size() < 5) throw std::invalid_argument("make_splits: need at least 5 instances");
    if (n_splits < 1) throw std::invalid_argument("make_splits: n_splits must be >= 1");
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw std::invalid_argument("make_splits: train_frac must be in (0,1)");

    const std::size_t n_train = static_cast<std::size_t>(std::llround(train_frac * ids.size()));
    if (n_train == 0 || n_train == ids.size())
        throw std::invalid_argument("make_splits: degenerate train fraction for this instance count");

    std::vector<SplitSpec> splits;
    for (int s = 0; s < n_splits; ++s) {
        SplitSpec spec;
        spec.split_id = s;
        spec.seed = mix_seed(seed, static_cast<std::uint64_t>(s));
        std::vector<std::string> shuffled = ids;
        Rng rng(spec.seed);
        for (std::size_t i = shuffled.size() - 1; i > 0; --i)
            std::swap(shuffled[i], shuffled[rng.index(i + 1)]);
        spec.train_ids.assign(shuffled.begin(), shuffled.begin() + n_train);
        spec.test_ids.assign(shuffled.begin() + n_train, shuffled.end());
        std::sort(spec.train_ids.begin(), spec.train_ids.end());
        std::sort(spec.test_ids.begin(), spec.test_ids.end());
        splits.push_back(std::move(spec));
    }
    return splits;
}

PerformanceProfile cross_validate(
    const std::vector<SplitSpec>& splits, Statistic statistic, int n_boot, double confidence,
    std::uint64_t seed,
    const std::function<std::vector<PerformanceProfile>(const SplitSpec&)>& eval_test_profiles) {
    if (splits.empty()) throw std::invalid_argument("cross_validate: no splits");
    std::vector<PerformanceProfile> pooled;
    for (const auto& split : splits) {
        auto profiles = eval_test_profiles(split);
        for (auto& p : profiles) pooled.push_back(std::move(p));
    }
    if (pooled.empty()) throw std::invalid_argument("cross_validate: pipeline produced no test profiles");
    return aggregate_instances(pooled, statistic, n_boot, confidence, seed);
}

PerformanceProfile apply_curve(const StrategyCurve& curve,
                               const std::vector<PerformanceProfile>& instance_profiles) {
    if (instance_profiles.empty()) throw std::invalid_argument("apply_curve: no profiles");
    PerformanceProfile out;
    out.instance_id = instance_profiles.front().instance_id;
    out.solver_id = instance_profiles.front().solver_id;
    out.params.solver_id = curve.kind;
    for (std::size_t gi = 0; gi < curve.points.size(); ++gi) {
        const StrategyPoint& sp = curve.points[gi];
        const PerformanceProfile* match = nullptr;
        for (const auto& p : instance_profiles)
            if (p.params == sp.params) match = &p;
        if (!match)
            throw std::invalid_argument("apply_curve: parameter point not evaluated on instance " +
                                        out.instance_id);
        if (gi >= match->points.size() || match->points[gi].resource != sp.resource)
            throw std::invalid_argument("apply_curve: resource grid mismatch");
        out.points.push_back(match->points[gi]);
    }
    return out;
}

void write_strategy_csv(const StrategyCurve& curve, const std::filesystem::path& path) {
    std::set<std::string> names;
    for (const auto& p : curve.points)
        for (const auto& [name, _] : p.params.values) names.insert(name);

    std::ostringstream out;
    out << "strategy,resource";
    for (const auto& name : names) out << ",param:" << name;
    out << ",estimate,ci_low,ci_high,needs_rerun\n";
    for (const auto& p : curve.points) {
        out << curve.kind << "," << format_double(p.resource);
        for (const auto& name : names) {
            auto it = p.params.values.find(name);
            out << "," << (it != p.params.values.end() ? format_double(it->second) : "");
        }
        out << "," << format_double(p.score) << "," << format_double(p.score) << ","
            << format_double(p.score) << "," << (p.needs_rerun ? 1 : 0) << "\n";
    }
    atomic_write(path, out.str());
}

}  // namespace sbench
