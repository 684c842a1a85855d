#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sbench/cim.hpp"
#include "sbench/io.hpp"
#include "sbench/profiles.hpp"
#include "sbench/pt.hpp"
#include "sbench/wishart.hpp"

namespace sbench::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t tag(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::uint64_t master_seed(const Config& cfg, const Options& opt) {
    if (opt.seed_override) return *opt.seed_override;
    if (!cfg.has("seed")) throw config_error("missing config key 'seed' (no wall-clock default)");
    return cfg.get_u64("seed");
}

fs::path out_dir(const Config& cfg) { return cfg.get_str("out.dir"); }
fs::path instances_dir(const Config& cfg) {
    return cfg.get_str("instances.dir", (out_dir(cfg) / "instances").string());
}

std::vector<fs::path> list_instance_files(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".ising") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

struct SolverSchema {
    std::string id;
    std::vector<std::string> param_names;
};

SolverSchema solver_schema(const Config& cfg) {
    const std::string id = cfg.get_str("solver");
    if (id == "pt") return {"pt", {"n_replicas", "p_cold", "p_hot", "sweeps"}};
    if (id == "cim-cac") return {"cim-cac", {"alpha", "beta", "gamma", "pump"}};
    throw config_error("unknown solver '" + id + "' (known solvers: pt, cim-cac)");
}

CimFixedParams cim_fixed_from_config(const Config& cfg) {
    CimFixedParams f;
    f.dt = cfg.get_double("cim.dt", f.dt);
    f.mu = cfg.get_double("cim.mu", f.mu);
    f.rho = cfg.get_double("cim.rho", f.rho);
    f.delta = cfg.get_double("cim.delta", f.delta);
    f.noise = cfg.get_double("cim.noise", f.noise);
    f.steps = static_cast<int>(cfg.get_int("cim.steps", f.steps));
    f.t_c = cfg.get_double("cim.t_c", f.t_c);
    return f;
}

SampleSet run_solver(const Config& cfg, const IsingInstance& instance, const ParameterPoint& point,
                     int shots, std::uint64_t seed) {
    if (point.solver_id == "pt") {
        PtParams p;
        p.n_replicas = static_cast<int>(std::llround(point.values.at("n_replicas")));
        p.sweeps = static_cast<int>(std::llround(point.values.at("sweeps")));
        p.p_cold = clamp_probability(point.values.at("p_cold"));
        p.p_hot = clamp_probability(point.values.at("p_hot"));
        p.n_replicas = std::max(1, p.n_replicas);
        p.sweeps = std::max(1, p.sweeps);
        SampleSet set = run_pt(instance, p, shots, seed);
        set.params = point;  // keep the requested point as the profile key
        return set;
    }
    if (point.solver_id == "cim-cac") {
        CimParams p;
        p.alpha = point.values.at("alpha");
        p.beta = point.values.at("beta");
        p.gamma = point.values.at("gamma");
        p.pump = point.values.at("pump");
        SampleSet set = run_cim(instance, p, cim_fixed_from_config(cfg), shots, seed);
        set.params = point;
        return set;
    }
    throw config_error("unknown solver '" + point.solver_id + "'");
}

// Pre-evaluated parameter grid: cartesian product of the param.* values
// (scalars are singleton axes; dist: specs do not contribute to the grid).
std::vector<ParameterPoint> param_grid(const Config& cfg, const SolverSchema& schema) {
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    for (const auto& name : schema.param_names) {
        const std::string key = "param." + name;
        const ParamSpec spec = parse_param_spec(cfg.get_str(key));
        if (std::holds_alternative<double>(spec)) {
            axes.emplace_back(name, std::vector<double>{std::get<double>(spec)});
        } else if (std::holds_alternative<std::vector<double>>(spec)) {
            axes.emplace_back(name, std::get<std::vector<double>>(spec));
        } else {
            throw config_error("param." + name +
                               " is a distribution; the run stage needs a value or grid "
                               "(put distributions under search.*)");
        }
    }
    std::vector<ParameterPoint> grid;
    grid.push_back({schema.id, {}});
    for (const auto& [name, values] : axes) {
        std::vector<ParameterPoint> next;
        for (const auto& base : grid) {
            for (double v : values) {
                ParameterPoint p = base;
                p.values[name] = v;
                next.push_back(std::move(p));
            }
        }
        grid = std::move(next);
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

double nominal_of(const ParamDist& dist) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DistUniform>) return 0.5 * (d.lo + d.hi);
            else if constexpr (std::is_same_v<T, DistLogUniform>) return std::sqrt(d.lo * d.hi);
            else if constexpr (std::is_same_v<T, DistRoundUniform>) return std::round(0.5 * (d.lo + d.hi));
            else return std::clamp(d.mean, d.min, d.max);
        },
        dist);
}

// search.* keys must be dist: specifications.
ParamDist parse_dist_key(const Config& cfg, const std::string& key) {
    const ParamSpec spec = parse_param_spec(cfg.get_str(key));
    if (!std::holds_alternative<ParamDist>(spec))
        throw config_error(key + " must be a dist: specification");
    return std::get<ParamDist>(spec);
}

// Exploration search space: search.* distributions take precedence, then
// param.* (dist as-is, scalar pinned, grid widened to a uniform over its
// range). Nominal point from nominal.* keys, else a per-distribution center.
SearchSpace search_space(const Config& cfg, const SolverSchema& schema) {
    SearchSpace space;
    space.solver_id = schema.id;
    for (const auto& name : schema.param_names) {
        ParamSpec spec = cfg.has("search." + name)
                             ? ParamSpec(parse_dist_key(cfg, "search." + name))
                             : parse_param_spec(cfg.get_str("param." + name));
        ParamDist dist;
        if (std::holds_alternative<ParamDist>(spec)) {
            dist = std::get<ParamDist>(spec);
        } else if (std::holds_alternative<double>(spec)) {
            const double v = std::get<double>(spec);
            dist = DistUniform{v, v};
        } else {
            const auto& g = std::get<std::vector<double>>(spec);
            const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
            dist = DistUniform{*lo, *hi};
        }
        space.dists[name] = dist;
        space.nominal[name] = cfg.get_double("nominal." + name, nominal_of(dist));
    }
    return space;
}

std::vector<MetaParams> meta_grid_from_config(const Config& cfg) {
    std::vector<MetaParams> grid;
    for (double f : cfg.get_list("meta.explore_frac"))
        for (double t : cfg.get_list("meta.tau")) grid.push_back({f, t});
    std::sort(grid.begin(), grid.end());
    return grid;
}

fs::path sampleset_path(const fs::path& dir, const std::string& instance_id,
                        const std::string& solver_id, const ParameterPoint& point) {
    return dir / (instance_id + "__" + solver_id + "__" + param_hash(point) + ".samples");
}

void write_params_index(const std::vector<ParameterPoint>& points, const fs::path& path) {
    std::ostringstream out;
    out << "param_hash,solver_id,params\n";
    std::set<std::string> seen;
    for (const auto& p : points) {
        const std::string h = param_hash(p);
        if (!seen.insert(h).second) continue;
        out << h << "," << p.solver_id << ",";
        bool first = true;
        for (const auto& [name, value] : p.values) {
            if (!first) out << ";";
            out << name << "=" << format_double(value);
            first = false;
        }
        out << "\n";
    }
    atomic_write(path, out.str());
}

std::vector<ParameterPoint> read_params_index(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params index: " + path.string());
    std::vector<ParameterPoint> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        std::istringstream ls(line);
        std::string hash, solver, rest;
        std::getline(ls, hash, ',');
        std::getline(ls, solver, ',');
        std::getline(ls, rest);
        ParameterPoint p;
        p.solver_id = solver;
        std::istringstream ps(rest);
        std::string kv;
        while (std::getline(ps, kv, ';')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw parse_error(path.string(), lineno, "bad param entry");
            p.values[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        out.push_back(std::move(p));
    }
    return out;
}

ResourceGrid read_grid(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
    ResourceGrid g;
    double v;
    while (in >> v) g.values.push_back(v);
    g.validate();
    return g;
}

void write_grid(const ResourceGrid& g, const fs::path& path) {
    std::ostringstream out;
    for (double v : g.values) out << format_double(v) << "\n";
    atomic_write(path, out.str());
}

// Per-instance VB provenance: instance_id,resource,param:...,estimate
void write_vb_params_csv(const VirtualBestResult& vb, const fs::path& path) {
    std::set<std::string> names;
    for (const auto& [_, c] : vb.per_instance_curve)
        for (const auto& p : c.points)
            for (const auto& [name, __] : p.params.values) names.insert(name);
    std::ostringstream out;
    out << "instance_id,resource";
    for (const auto& name : names) out << ",param:" << name;
    out << ",estimate\n";
    for (const auto& [inst, c] : vb.per_instance_curve) {
        for (const auto& p : c.points) {
            out << inst << "," << format_double(p.resource);
            for (const auto& name : names) {
                auto it = p.params.values.find(name);
                out << "," << (it != p.params.values.end() ? format_double(it->second) : "");
            }
            out << "," << format_double(p.score) << "\n";
        }
    }
    atomic_write(path, out.str());
}

void write_profile_csv_single(const PerformanceProfile& prof, const fs::path& path) {
    write_profiles_csv({prof}, path);
}

// Simple work pool over an index range; results must not depend on order.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex err_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                failed = true;
                if (error.empty()) error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min<int>(jobs, static_cast<int>(count));
    pool.reserve(k);
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed) throw std::runtime_error(error);
}

}  // namespace

int cmd_gen(const Config& cfg, const Options& opt) {
    const std::uint64_t seed = master_seed(cfg, opt);
    const fs::path dir = instances_dir(cfg);

    WishartSpec spec;
    spec.n = static_cast<int>(cfg.get_int("gen.n"));
    spec.alpha = cfg.get_double("gen.alpha");
    spec.count = static_cast<int>(cfg.get_int("gen.count"));
    spec.seed = mix_seed(seed, tag("gen"));
    spec.validate();

    if (fs::is_directory(dir) && !fs::is_empty(dir) && !opt.force)
        throw config_error("output directory " + dir.string() + " is not empty (use --force)");
    fs::create_directories(dir);

    const auto instances = generate_wishart(spec);
    std::ostringstream manifest;
    manifest << "id,file,n,ground_energy\n";
    for (const auto& inst : instances) {
        const std::string file = inst.id() + ".ising";
        write_instance(inst, dir / file);
        manifest << inst.id() << "," << file << "," << inst.n() << ","
                 << format_double(*inst.ground_energy()) << "\n";
    }
    atomic_write(dir / "manifest.csv", manifest.str());
    std::cout << "gen: wrote " << instances.size() << " instances to " << dir << "\n";
    return kOk;
}

int cmd_run(const Config& cfg, const Options& opt) {
    const std::uint64_t seed = master_seed(cfg, opt);
    const SolverSchema schema = solver_schema(cfg);
    const int shots = static_cast<int>(cfg.get_int("shots"));
    if (shots < 1) throw config_error("shots must be >= 1");

    const auto files = list_instance_files(instances_dir(cfg));
    if (files.empty())
        throw missing_artifact_error("missing upstream artifact: no instances in " +
                                 instances_dir(cfg).string() + " (run `gen` first)");

    const auto grid = param_grid(cfg, schema);
    const fs::path samples = out_dir(cfg) / "samples";
    fs::create_directories(samples);

    struct Job {
        fs::path instance_file;
        ParameterPoint point;
    };
    std::vector<Job> jobs_list;
    for (const auto& f : files)
        for (const auto& p : grid) jobs_list.push_back({f, p});

    std::atomic<int> done{0}, skipped{0};
    parallel_for(jobs_list.size(), opt.jobs, [&](std::size_t i) {
        const Job& job = jobs_list[i];
        const IsingInstance inst = read_instance(job.instance_file);
        const fs::path target = sampleset_path(samples, inst.id(), schema.id, job.point);
        if (fs::exists(target) && !opt.force) {
            ++skipped;
            return;
        }
        const std::uint64_t run_seed =
            mix_seed(seed, {tag("run"), tag(inst.id()), tag(param_hash(job.point))});
        const SampleSet set = run_solver(cfg, inst, job.point, shots, run_seed);
        write_sampleset(set, target);
        ++done;
    });
    write_params_index(grid, samples / "params.csv");
    std::cout << "run: " << done << " sample sets written, " << skipped << " skipped (resume)\n";
    return kOk;
}

int cmd_profile(const Config& cfg, const Options& opt) {
    const std::uint64_t seed = master_seed(cfg, opt);
    const fs::path samples = out_dir(cfg) / "samples";
    if (!fs::is_directory(samples) || !fs::exists(samples / "params.csv"))
        throw missing_artifact_error("missing upstream artifact: " + samples.string() +
                                 " (run `run` first)");

    std::vector<SampleSet> pools;
    for (const auto& entry : fs::directory_iterator(samples))
        if (entry.path().extension() == ".samples") pools.push_back(read_sampleset(entry.path()));
    if (pools.empty()) throw missing_artifact_error("missing upstream artifact: no sample sets (run `run` first)");
    std::sort(pools.begin(), pools.end(), [](const SampleSet& a, const SampleSet& b) {
        return std::tie(a.instance_id, a.params) < std::tie(b.instance_id, b.params);
    });

    double r0 = std::numeric_limits<double>::infinity();
    double rf = std::numeric_limits<double>::infinity();
    for (const auto& p : pools) {
        r0 = std::min(r0, p.total_resource / p.records.size());
        rf = std::min(rf, p.total_resource);
    }
    const int points = static_cast<int>(cfg.get_int("grid.points", 20));
    const ResourceGrid grid = ResourceGrid::log_spaced(r0, rf, points);

    const int n_boot = static_cast<int>(cfg.get_int("boot.n", 1000));
    const double confidence = cfg.get_double("boot.confidence", 0.95);

    const fs::path dir = out_dir(cfg) / "profiles";
    fs::create_directories(dir);

    std::vector<PerformanceProfile> profiles(pools.size());
    std::vector<ParameterPoint> points_seen;
    for (const auto& p : pools) points_seen.push_back(p.params);
    parallel_for(pools.size(), opt.jobs, [&](std::size_t i) {
        const SampleSet& pool = pools[i];
        const IsingInstance inst = read_instance(instances_dir(cfg) / (pool.instance_id + ".ising"));
        const std::uint64_t boot_seed =
            mix_seed(seed, {tag("boot"), tag(pool.instance_id), tag(param_hash(pool.params))});
        profiles[i] = bootstrap_profile(pool, grid, n_boot, confidence, inst, boot_seed);
    });

    write_grid(grid, dir / "grid.csv");
    write_params_index(points_seen, dir / "params.csv");
    write_profiles_csv(profiles, dir / "profiles.csv");
    std::cout << "profile: " << profiles.size() << " profiles over " << grid.values.size()
              << " resource points\n";
    return kOk;
}

namespace {

struct ProfileStore {
    ResourceGrid grid;
    std::vector<ParameterPoint> params;
    std::vector<PerformanceProfile> profiles;
    std::vector<std::string> instance_ids;
};

ProfileStore load_profiles(const Config& cfg) {
    const fs::path dir = out_dir(cfg) / "profiles";
    if (!fs::exists(dir / "profiles.csv"))
        throw missing_artifact_error("missing upstream artifact: " + (dir / "profiles.csv").string() +
                                 " (run `profile` first)");
    ProfileStore store;
    store.grid = read_grid(dir / "grid.csv");
    store.params = read_params_index(dir / "params.csv");
    store.profiles = read_profiles_csv(dir / "profiles.csv", store.params);
    std::set<std::string> ids;
    for (const auto& p : store.profiles) ids.insert(p.instance_id);
    store.instance_ids.assign(ids.begin(), ids.end());
    return store;
}

// Nearest evaluated parameter point in log-parameter space, deterministic
// tie-break on the smaller point.
ParameterPoint snap_to_evaluated(const ParameterPoint& p,
                                 const std::vector<ParameterPoint>& evaluated) {
    if (evaluated.empty()) throw std::invalid_argument("snap_to_evaluated: no evaluated points");
    const ParameterPoint* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& cand : evaluated) {
        double d = 0.0;
        for (const auto& [name, v] : p.values) {
            auto it = cand.values.find(name);
            if (it == cand.values.end()) continue;
            const double a = std::log(std::max(std::abs(v), 1e-12));
            const double b = std::log(std::max(std::abs(it->second), 1e-12));
            d += (a - b) * (a - b);
        }
        if (!best || d < best_d || (d == best_d && cand < *best)) {
            best_d = d;
            best = &cand;
        }
    }
    return *best;
}

// Table lookup of a bootstrap estimate: exact parameter match, resource
// rounded down to the largest grid value not exceeding it.
double profile_estimate(const ProfileStore& store, const std::string& inst_id,
                        const ParameterPoint& point, double resource) {
    for (const auto& p : store.profiles) {
        if (p.instance_id != inst_id || !(p.params == point)) continue;
        const ProfilePoint* pick = &p.points.front();
        for (const auto& pt : p.points)
            if (pt.resource <= resource * (1.0 + 1e-12)) pick = &pt;
        return pick->estimate;
    }
    throw std::invalid_argument("profile_estimate: no profile for instance " + inst_id);
}

// Exploration scores come from the evaluated profile table rather than from
// fresh solver runs: candidates snap to the nearest evaluated point. This
// keeps the strategy stage deterministic given the profile stage and makes
// every strategy value a member of the same estimate table the virtual best
// maximizes over.
EvaluateFn profile_evaluator(const ProfileStore& store, const std::string& inst_id) {
    return [&store, inst_id](const ParameterPoint& point, double resource) {
        return profile_estimate(store, inst_id, snap_to_evaluated(point, store.params), resource);
    };
}

}  // namespace

int cmd_strategies(const Config& cfg, const Options& opt) {
    const std::uint64_t seed = master_seed(cfg, opt);
    const SolverSchema schema = solver_schema(cfg);
    const int shots = static_cast<int>(cfg.get_int("shots"));
    ProfileStore store = load_profiles(cfg);

    const fs::path dir = out_dir(cfg) / "strategies";
    fs::create_directories(dir);
    const int n_boot = static_cast<int>(cfg.get_int("boot.n", 1000));
    const double confidence = cfg.get_double("boot.confidence", 0.95);
    const int window = static_cast<int>(cfg.get_int("smooth.window", 5));

    // Fixed strategy, argmax-of-aggregate: always an evaluated point.
    const StrategyCurve fixed_argmax = fixed_best(store.profiles, FixedBestMode::ArgmaxOfAggregate);
    write_strategy_csv(fixed_argmax, dir / "fixed_argmax.csv");

    // Fixed strategy, average-of-argmax: smooth, then rerun any parameter
    // point that was never evaluated so its reported score is verified.
    StrategyCurve fixed_avg = fixed_best(store.profiles, FixedBestMode::AverageOfArgmax);
    std::vector<ParameterPoint> evaluated(store.params);
    fixed_avg = smooth_curve(fixed_avg, window, FitFamily::None, &evaluated);
    fixed_avg.kind = "fixed";

    std::set<ParameterPoint> rerun_points;
    for (const auto& p : fixed_avg.points)
        if (p.needs_rerun) rerun_points.insert(p.params);

    std::vector<PerformanceProfile> extended = store.profiles;
    if (!rerun_points.empty()) {
        struct RerunJob {
            std::string instance_id;
            ParameterPoint point;
        };
        std::vector<RerunJob> jobs_list;
        for (const auto& p : rerun_points)
            for (const auto& inst_id : store.instance_ids) jobs_list.push_back({inst_id, p});
        std::vector<PerformanceProfile> rerun_profiles(jobs_list.size());
        parallel_for(jobs_list.size(), opt.jobs, [&](std::size_t i) {
            const auto& job = jobs_list[i];
            const IsingInstance inst =
                read_instance(instances_dir(cfg) / (job.instance_id + ".ising"));
            const std::uint64_t sub =
                mix_seed(seed, {tag("rerun"), tag(job.instance_id), tag(param_hash(job.point))});
            SampleSet set = run_solver(cfg, inst, job.point, shots, sub);
            // Rerun pools can be shorter in resource than the common grid;
            // reuse the grid truncated to this pool's budget.
            ResourceGrid g;
            for (double r : store.grid.values)
                if (r <= set.total_resource) g.values.push_back(r);
            if (g.values.empty()) g.values.push_back(set.total_resource);
            const std::uint64_t boot =
                mix_seed(seed, {tag("boot-rerun"), tag(job.instance_id), tag(param_hash(job.point))});
            PerformanceProfile prof = bootstrap_profile(set, g, n_boot, confidence, inst, boot);
            // Extend flat to the full grid so downstream alignment holds.
            while (prof.points.size() < store.grid.values.size()) {
                ProfilePoint pt = prof.points.back();
                pt.resource = store.grid.values[prof.points.size()];
                prof.points.push_back(pt);
            }
            rerun_profiles[i] = std::move(prof);
        });
        for (auto& p : rerun_profiles) extended.push_back(std::move(p));
        // Update the verified scores of the rerun points.
        for (auto& sp : fixed_avg.points) {
            if (!sp.needs_rerun) continue;
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& p : extended) {
                if (!(p.params == sp.params)) continue;
                for (const auto& pt : p.points) {
                    if (pt.resource == sp.resource) {
                        sum += pt.estimate;
                        ++count;
                    }
                }
            }
            if (count > 0) sp.score = sum / count;
        }
    }
    write_strategy_csv(fixed_avg, dir / "fixed_average.csv");
    std::vector<ParameterPoint> all_points = evaluated;
    all_points.insert(all_points.end(), rerun_points.begin(), rerun_points.end());
    write_params_index(all_points, dir / "params_evaluated.csv");
    if (!rerun_points.empty())
        write_profiles_csv(extended, dir / "profiles_extended.csv");

    // Virtual best over every evaluated point, including reruns.
    const VirtualBestResult vb = virtual_best(extended);
    write_vb_params_csv(vb, dir / "vb_params.csv");
    std::vector<PerformanceProfile> vb_profiles;
    for (const auto& [_, p] : vb.per_instance_profile) vb_profiles.push_back(p);
    const PerformanceProfile vb_agg =
        aggregate_instances(vb_profiles, Statistic::Mean, n_boot, confidence, mix_seed(seed, tag("vb")));
    write_profile_csv_single(vb_agg, dir / "vb_profile.csv");

    // Exploration-exploitation meta sweep over all instances as training.
    const SearchSpace space = search_space(cfg, schema);
    const std::vector<MetaParams> metas = meta_grid_from_config(cfg);
    const int n_rep = static_cast<int>(cfg.get_int("meta.reps", 1));

    auto run_ee = [&](const std::string& inst_id, const MetaParams& meta, double budget,
                      std::uint64_t sub) {
        return explore_exploit(budget, meta, space, profile_evaluator(store, inst_id), sub);
    };
    const MetaSweepResult sweep =
        meta_sweep(metas, store.grid, store.instance_ids, n_rep, mix_seed(seed, tag("meta")), run_ee, window);

    {
        std::ostringstream out;
        out << "kind,resource,explore_frac,tau,estimate\n";
        auto dump = [&](const StrategyCurve& c, const char* kind) {
            for (const auto& p : c.points)
                out << kind << "," << format_double(p.resource) << ","
                    << format_double(p.params.values.at("explore_frac")) << ","
                    << format_double(p.params.values.at("tau")) << "," << format_double(p.score)
                    << "\n";
        };
        dump(sweep.best, "best");
        dump(sweep.actionable, "actionable");
        atomic_write(dir / "meta.csv", out.str());
    }

    // EE profile at the full-budget actionable meta point: for each budget
    // on the grid, the strategy picks a parameter point; its value is that
    // point's tabulated estimate at the same budget, so the virtual best
    // dominates it pointwise by construction.
    const StrategyPoint& final_meta_pt = sweep.actionable.points.back();
    MetaParams best_meta{final_meta_pt.params.values.at("explore_frac"),
                         final_meta_pt.params.values.at("tau")};
    std::vector<PerformanceProfile> ee_profiles;
    for (std::size_t ii = 0; ii < store.instance_ids.size(); ++ii) {
        const std::string& id = store.instance_ids[ii];
        PerformanceProfile prof;
        prof.instance_id = id;
        prof.solver_id = schema.id;
        prof.params.solver_id = "explore-exploit";
        for (std::size_t gi = 0; gi < store.grid.values.size(); ++gi) {
            const double budget = store.grid.values[gi];
            double acc = 0.0;
            for (int rep = 0; rep < n_rep; ++rep) {
                const std::uint64_t sub =
                    mix_seed(seed, {tag("ee"), ii, gi, static_cast<std::uint64_t>(rep)});
                const ExploreExploitResult ee = run_ee(id, best_meta, budget, sub);
                acc += profile_estimate(store, id, snap_to_evaluated(ee.chosen, store.params),
                                        budget);
            }
            ProfilePoint pt;
            pt.resource = budget;
            pt.estimate = acc / n_rep;
            pt.ci_low = pt.ci_high = pt.estimate;
            pt.n_boot = 0;
            prof.points.push_back(pt);
        }
        ee_profiles.push_back(std::move(prof));
    }
    const PerformanceProfile ee_agg = aggregate_instances(ee_profiles, Statistic::Mean, n_boot,
                                                          confidence, mix_seed(seed, tag("ee-agg")));
    write_profile_csv_single(ee_agg, dir / "ee_profile.csv");

    std::cout << "strategies: vb, fixed (2 variants, " << rerun_points.size()
              << " rerun points), explore-exploit over " << metas.size() << " meta cells\n";
    return kOk;
}

int cmd_report(const Config& cfg, const Options& opt) {
    const std::uint64_t seed = master_seed(cfg, opt);
    const SolverSchema schema = solver_schema(cfg);
    ProfileStore store = load_profiles(cfg);
    const fs::path strat_dir = out_dir(cfg) / "strategies";
    if (!fs::exists(strat_dir / "vb_profile.csv"))
        throw missing_artifact_error("missing upstream artifact: " + strat_dir.string() +
                                 " (run `strategies` first)");

    const fs::path dir = out_dir(cfg) / "report";
    fs::create_directories(dir);
    const int n_boot = static_cast<int>(cfg.get_int("boot.n", 1000));
    const double confidence = cfg.get_double("boot.confidence", 0.95);
    const int n_splits = static_cast<int>(cfg.get_int("splits.n", 10));
    const double train_frac = cfg.get_double("splits.train_frac", 0.8);
    const int window = static_cast<int>(cfg.get_int("smooth.window", 5));
    const std::string stat_name = cfg.get_str("report.statistic", "mean");
    const Statistic stat = stat_name == "median" ? Statistic::Median : Statistic::Mean;

    const auto splits =
        make_splits(store.instance_ids, n_splits, train_frac, mix_seed(seed, tag("splits")));

    auto profiles_of = [&](const std::vector<std::string>& ids) {
        std::vector<PerformanceProfile> out;
        for (const auto& p : store.profiles)
            if (std::find(ids.begin(), ids.end(), p.instance_id) != ids.end()) out.push_back(p);
        return out;
    };

    // Virtual best: per-instance oracle, no training involved.
    auto vb_pipeline = [&](const SplitSpec& split) {
        const VirtualBestResult vb = virtual_best(profiles_of(split.test_ids));
        std::vector<PerformanceProfile> out;
        for (const auto& [_, p] : vb.per_instance_profile) out.push_back(p);
        return out;
    };

    // Fixed, argmax-of-aggregate on train, applied to test.
    auto fixed_pipeline = [&](const SplitSpec& split) {
        const StrategyCurve curve =
            fixed_best(profiles_of(split.train_ids), FixedBestMode::ArgmaxOfAggregate);
        std::vector<PerformanceProfile> out;
        for (const auto& id : split.test_ids)
            out.push_back(apply_curve(curve, profiles_of({id})));
        return out;
    };

    // Fixed, average-of-argmax on train: smoothed, snapped to the nearest
    // evaluated point (log-space distance) for test evaluation.
    auto fixed_avg_pipeline = [&](const SplitSpec& split) {
        StrategyCurve curve = fixed_best(profiles_of(split.train_ids), FixedBestMode::AverageOfArgmax);
        curve = smooth_curve(curve, window, FitFamily::None, &store.params);
        for (auto& sp : curve.points) {
            if (sp.needs_rerun) sp.params = snap_to_evaluated(sp.params, store.params);
        }
        std::vector<PerformanceProfile> out;
        for (const auto& id : split.test_ids)
            out.push_back(apply_curve(curve, profiles_of({id})));
        return out;
    };

    // Explore-exploit: meta choice from the train split, evaluated on test
    // through the same estimate table, so the test virtual best bounds it.
    const SearchSpace space = search_space(cfg, schema);
    const std::vector<MetaParams> metas = meta_grid_from_config(cfg);
    const int n_rep = static_cast<int>(cfg.get_int("meta.reps", 1));
    auto run_ee = [&](const std::string& inst_id, const MetaParams& meta, double budget,
                      std::uint64_t sub) {
        return explore_exploit(budget, meta, space, profile_evaluator(store, inst_id), sub);
    };
    auto ee_pipeline = [&](const SplitSpec& split) {
        const MetaSweepResult sweep = meta_sweep(metas, store.grid, split.train_ids, n_rep,
                                                 mix_seed(split.seed, tag("meta")), run_ee, window);
        const StrategyPoint& last = sweep.actionable.points.back();
        const MetaParams best{last.params.values.at("explore_frac"), last.params.values.at("tau")};
        std::vector<PerformanceProfile> out;
        for (std::size_t ti = 0; ti < split.test_ids.size(); ++ti) {
            const std::string& id = split.test_ids[ti];
            PerformanceProfile prof;
            prof.instance_id = id;
            prof.solver_id = schema.id;
            prof.params.solver_id = "explore-exploit";
            for (std::size_t gi = 0; gi < store.grid.values.size(); ++gi) {
                const double budget = store.grid.values[gi];
                double acc = 0.0;
                for (int rep = 0; rep < n_rep; ++rep) {
                    const std::uint64_t sub = mix_seed(
                        split.seed, {tag("ee-test"), ti, gi, static_cast<std::uint64_t>(rep)});
                    const ExploreExploitResult ee = run_ee(id, best, budget, sub);
                    acc += profile_estimate(store, id,
                                            snap_to_evaluated(ee.chosen, store.params), budget);
                }
                ProfilePoint pt;
                pt.resource = budget;
                pt.estimate = acc / n_rep;
                pt.ci_low = pt.ci_high = pt.estimate;
                prof.points.push_back(pt);
            }
            out.push_back(std::move(prof));
        }
        return out;
    };

    json index;
    index["schema_version"] = 1;
    index["solver"] = schema.id;
    index["seed"] = master_seed(cfg, opt);
    index["n_splits"] = n_splits;
    index["train_frac"] = train_frac;
    index["files"] = json::object();

    struct NamedPipeline {
        std::string name;
        std::function<std::vector<PerformanceProfile>(const SplitSpec&)> fn;
    };
    const std::vector<NamedPipeline> pipelines = {{"virtual_best", vb_pipeline},
                                                  {"fixed_argmax", fixed_pipeline},
                                                  {"fixed_average", fixed_avg_pipeline},
                                                  {"explore_exploit", ee_pipeline}};
    for (const auto& pl : pipelines) {
        const PerformanceProfile cv = cross_validate(splits, stat, n_boot, confidence,
                                                     mix_seed(seed, tag("cv-" + pl.name)), pl.fn);
        const std::string fname = "cv_" + pl.name + ".csv";
        write_profile_csv_single(cv, dir / fname);
        index["files"]["cv"][pl.name] = fname;
    }

    // Scaling table: score at a fixed resource vs instance size.
    {
        const double r_star = cfg.get_double("report.scaling_resource", store.grid.r_f());
        std::size_t gi = 0;
        for (std::size_t i = 0; i < store.grid.values.size(); ++i)
            if (store.grid.values[i] <= r_star * (1.0 + 1e-12)) gi = i;
        std::map<int, std::vector<PerformanceProfile>> by_n;
        const VirtualBestResult vb = virtual_best(store.profiles);
        for (const auto& [id, prof] : vb.per_instance_profile) {
            const IsingInstance inst = read_instance(instances_dir(cfg) / (id + ".ising"));
            by_n[inst.n()].push_back(prof);
        }
        std::ostringstream out;
        out << "n,solver,resource,estimate,ci_low,ci_high\n";
        for (const auto& [n, profs] : by_n) {
            const PerformanceProfile agg = aggregate_instances(
                profs, stat, n_boot, confidence, mix_seed(seed, {tag("scaling"), static_cast<std::uint64_t>(n)}));
            const ProfilePoint& pt = agg.points[gi];
            out << n << "," << schema.id << "," << format_double(pt.resource) << ","
                << format_double(pt.estimate) << "," << format_double(pt.ci_low) << ","
                << format_double(pt.ci_high) << "\n";
        }
        atomic_write(dir / "scaling.csv", out.str());
        index["files"]["scaling"] = "scaling.csv";
    }

    // Strategy and meta curves from the strategies stage, referenced as-is.
    for (const char* f : {"vb_profile.csv", "fixed_argmax.csv", "fixed_average.csv", "meta.csv",
                          "ee_profile.csv", "vb_params.csv"}) {
        if (fs::exists(strat_dir / f)) {
            fs::copy_file(strat_dir / f, dir / f, fs::copy_options::overwrite_existing);
            index["files"]["strategies"][f] = f;
        }
    }

    atomic_write(dir / "report.json", index.dump(2) + "\n");
    std::cout << "report: window sticker written to " << dir << "\n";
    return kOk;
}

}  // namespace sbench::pipeline
