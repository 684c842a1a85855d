#include "sbench/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "sbench/io.hpp"
#include "sbench/rng.hpp"

namespace sbench {

void ResourceGrid::validate() const {
    if (values.empty()) throw std::invalid_argument("ResourceGrid: empty");
    double prev = 0.0;
    for (double v : values) {
        if (!(v > prev)) throw std::invalid_argument("ResourceGrid: values must be strictly ascending and positive");
        prev = v;
    }
}

ResourceGrid ResourceGrid::log_spaced(double r0, double rf, int points) {
    if (!(r0 > 0.0) || !(rf >= r0) || points < 1)
        throw std::invalid_argument("ResourceGrid::log_spaced: invalid range");
    ResourceGrid g;
    if (points == 1 || rf == r0) {
        g.values = {r0};
        if (rf > r0) g.values.push_back(rf);
        return g;
    }
    const double lr0 = std::log(r0), lrf = std::log(rf);
    g.values.resize(points);
    for (int i = 0; i < points; ++i)
        g.values[i] = std::exp(lr0 + (lrf - lr0) * i / (points - 1));
    g.values.front() = r0;
    g.values.back() = rf;
    // log spacing can collide at low resolution; dedupe ascending
    g.values.erase(std::unique(g.values.begin(), g.values.end(),
                               [](double a, double b) { return !(b > a); }),
                   g.values.end());
    return g;
}

ResourceGrid PerformanceProfile::grid() const {
    ResourceGrid g;
    g.values.reserve(points.size());
    for (const auto& p : points) g.values.push_back(p.resource);
    return g;
}

double performance_score(double best_found, double optimal, double random_base) {
    if (optimal == random_base)
        throw degenerate_instance_error("performance_score: optimal equals random baseline");
    return (best_found - random_base) / (optimal - random_base);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return values[lo];
    const double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

PerformanceProfile bootstrap_profile(const SampleSet& pool, const ResourceGrid& grid, int n_boot,
                                     double confidence, double optimal_energy, double random_base,
                                     std::uint64_t seed) {
    pool.validate();
    grid.validate();
    if (n_boot < 100) throw std::invalid_argument("bootstrap_profile: n_boot must be >= 100");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("bootstrap_profile: confidence must be in (0,1)");
    if (grid.r_f() > pool.total_resource * (1.0 + 1e-12))
        throw std::invalid_argument("bootstrap_profile: r_f exceeds pool resource budget");

    std::vector<double> best_energies;
    best_energies.reserve(pool.records.size());
    for (const auto& r : pool.records) best_energies.push_back(r.energy);
    const double mean_cost = pool.total_resource / pool.records.size();
    const std::size_t pool_size = best_energies.size();

    PerformanceProfile prof;
    prof.instance_id = pool.instance_id;
    prof.solver_id = pool.solver_id;
    prof.params = pool.params;
    prof.points.reserve(grid.values.size());

    const double q_lo = (1.0 - confidence) / 2.0;
    std::vector<double> stats(n_boot);
    for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
        const double r = grid.values[gi];
        const std::size_t k = static_cast<std::size_t>(std::max<long long>(
            1, static_cast<long long>(std::floor(r / mean_cost))));
        double sum = 0.0;
        for (int b = 0; b < n_boot; ++b) {
            // Fixed partition of the resample index space: substream per
            // (grid point, resample), independent of execution order.
            Rng rng(mix_seed(seed, {gi, static_cast<std::uint64_t>(b)}));
            double min_e = best_energies[rng.index(pool_size)];
            for (std::size_t d = 1; d < k; ++d)
                min_e = std::min(min_e, best_energies[rng.index(pool_size)]);
            stats[b] = performance_score(min_e, optimal_energy, random_base);
            sum += stats[b];
        }
        ProfilePoint pt;
        pt.resource = r;
        pt.estimate = sum / n_boot;
        pt.ci_low = std::min(pt.estimate, percentile(stats, q_lo));
        pt.ci_high = std::max(pt.estimate, percentile(stats, 1.0 - q_lo));
        pt.n_boot = n_boot;
        prof.points.push_back(pt);
    }
    return prof;
}

PerformanceProfile bootstrap_profile(const SampleSet& pool, const ResourceGrid& grid, int n_boot,
                                     double confidence, const IsingInstance& instance,
                                     std::uint64_t seed) {
    if (!instance.ground_energy())
        throw std::invalid_argument("bootstrap_profile: instance lacks a planted ground energy");
    return bootstrap_profile(pool, grid, n_boot, confidence, *instance.ground_energy(),
                             random_baseline(instance), seed);
}

namespace {

double statistic_of(std::vector<double>& values, Statistic s) {
    if (s == Statistic::Mean)
        return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

PerformanceProfile aggregate_instances(const std::vector<PerformanceProfile>& profiles,
                                       Statistic statistic, int n_boot, double confidence,
                                       std::uint64_t seed) {
    if (profiles.empty()) throw std::invalid_argument("aggregate_instances: empty profile list");
    const ResourceGrid grid = profiles.front().grid();
    for (const auto& p : profiles)
        if (!(p.grid() == grid)) throw std::invalid_argument("aggregate_instances: mismatched resource grids");
    if (n_boot < 1) throw std::invalid_argument("aggregate_instances: n_boot must be >= 1");

    PerformanceProfile out;
    out.instance_id = "aggregate";
    out.solver_id = profiles.front().solver_id;
    out.params = profiles.front().params;

    const std::size_t n_inst = profiles.size();
    const double q_lo = (1.0 - confidence) / 2.0;
    std::vector<double> values(n_inst), resampled(n_inst), boots(n_boot);
    for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
        for (std::size_t i = 0; i < n_inst; ++i) values[i] = profiles[i].points[gi].estimate;
        std::vector<double> tmp = values;
        ProfilePoint pt;
        pt.resource = grid.values[gi];
        pt.estimate = statistic_of(tmp, statistic);
        for (int b = 0; b < n_boot; ++b) {
            Rng rng(mix_seed(seed, {gi, static_cast<std::uint64_t>(b)}));
            for (std::size_t i = 0; i < n_inst; ++i) resampled[i] = values[rng.index(n_inst)];
            boots[b] = statistic_of(resampled, statistic);
        }
        pt.ci_low = std::min(pt.estimate, percentile(boots, q_lo));
        pt.ci_high = std::max(pt.estimate, percentile(boots, 1.0 - q_lo));
        pt.n_boot = n_boot;
        out.points.push_back(pt);
    }
    return out;
}

void write_profiles_csv(const std::vector<PerformanceProfile>& profiles,
                        const std::filesystem::path& path) {
    std::ostringstream out;
    out << "instance_id,solver_id,param_hash,resource,estimate,ci_low,ci_high,n_boot\n";
    for (const auto& p : profiles) {
        const std::string ph = param_hash(p.params);
        for (const auto& pt : p.points) {
            out << p.instance_id << "," << p.solver_id << "," << ph << ","
                << format_double(pt.resource) << "," << format_double(pt.estimate) << ","
                << format_double(pt.ci_low) << "," << format_double(pt.ci_high) << ","
                << pt.n_boot << "\n";
        }
    }
    atomic_write(path, out.str());
}

std::vector<PerformanceProfile> read_profiles_csv(const std::filesystem::path& path,
                                                  const std::vector<ParameterPoint>& known_params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profiles csv: " + path.string());
    std::map<std::string, ParameterPoint> by_hash;
    for (const auto& p : known_params) by_hash[param_hash(p)] = p;

    std::vector<PerformanceProfile> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;  // (instance, hash) -> pos

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;  // header
        std::istringstream ls(line);
        std::string inst, solver, hash, field;
        std::getline(ls, inst, ',');
        std::getline(ls, solver, ',');
        std::getline(ls, hash, ',');
        ProfilePoint pt;
        std::getline(ls, field, ',');
        pt.resource = std::stod(field);
        std::getline(ls, field, ',');
        pt.estimate = std::stod(field);
        std::getline(ls, field, ',');
        pt.ci_low = std::stod(field);
        std::getline(ls, field, ',');
        pt.ci_high = std::stod(field);
        std::getline(ls, field, ',');
        pt.n_boot = std::stoi(field);

        auto key = std::make_pair(inst, hash);
        auto it = index.find(key);
        if (it == index.end()) {
            PerformanceProfile p;
            p.instance_id = inst;
            p.solver_id = solver;
            auto ph = by_hash.find(hash);
            if (ph == by_hash.end())
                throw parse_error(path.string(), lineno, "unknown param_hash " + hash);
            p.params = ph->second;
            index[key] = out.size();
            out.push_back(std::move(p));
            it = index.find(key);
        }
        out[it->second].points.push_back(pt);
    }
    return out;
}

}  // namespace sbench
