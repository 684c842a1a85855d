#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "sbench/strategies.hpp"

using namespace sbench;

namespace {

PerformanceProfile prof(const char* inst, double sweeps, std::vector<double> estimates) {
    PerformanceProfile p;
    p.instance_id = inst;
    p.solver_id = "pt";
    p.params = {"pt", {{"sweeps", sweeps}}};
    double r = 1.0;
    for (double e : estimates) {
        p.points.push_back({r, e, e, e, 100});
        r *= 2.0;
    }
    return p;
}

StrategyCurve curve_of(std::vector<double> sweeps) {
    StrategyCurve c;
    c.kind = "fixed";
    double r = 1.0;
    for (double s : sweeps) {
        StrategyPoint p;
        p.resource = r;
        p.params = {"pt", {{"sweeps", s}}};
        p.score = 0.5;
        c.points.push_back(std::move(p));
        r *= 2.0;
    }
    return c;
}

}  // namespace

TEST_CASE("distribution sampling stays in range") {
    Rng rng(1);
    for (int k = 0; k < 500; ++k) {
        const double u = sample_dist(DistUniform{2.0, 5.0}, rng);
        CHECK(u >= 2.0);
        CHECK(u < 5.0);
        const double lu = sample_dist(DistLogUniform{1.0, 1000.0}, rng);
        CHECK(lu >= 1.0);
        CHECK(lu <= 1000.0);
        const double ru = sample_dist(DistRoundUniform{1.0, 8.0}, rng);
        CHECK(ru == std::round(ru));
        CHECK(ru >= 1.0);
        CHECK(ru <= 8.0);
        const double tn = sample_dist(DistTruncNormal{0.0, 1.0, -0.5, 0.5}, rng);
        CHECK(tn >= -0.5);
        CHECK(tn <= 0.5);
    }
    // impossible truncation falls back to the clamped mean
    const double clamped = sample_dist(DistTruncNormal{0.0, 1e-12, 5.0, 6.0}, rng);
    CHECK(clamped == 5.0);
}

TEST_CASE("virtual best takes the pointwise maximum with deterministic ties") {
    // crossing profiles on one instance
    const auto low = prof("a", 10.0, {0.6, 0.4, 0.3});
    const auto high = prof("a", 30.0, {0.2, 0.5, 0.9});
    const auto tied = prof("a", 20.0, {0.6, 0.1, 0.1});

    const auto vb = virtual_best({low, high, tied});
    REQUIRE(vb.per_instance_curve.count("a") == 1);
    const auto& c = vb.per_instance_curve.at("a");
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].score == 0.6);
    CHECK(c.points[0].params.values.at("sweeps") == 10.0);  // tie -> smaller params
    CHECK(c.points[1].score == 0.5);
    CHECK(c.points[1].params.values.at("sweeps") == 30.0);
    CHECK(c.points[2].score == 0.9);
    CHECK(c.points[2].params.values.at("sweeps") == 30.0);

    // dominance property: vb >= each input everywhere
    const auto& vp = vb.per_instance_profile.at("a");
    for (const auto* p : {&low, &high, &tied})
        for (std::size_t gi = 0; gi < 3; ++gi)
            CHECK(vp.points[gi].estimate >= p->points[gi].estimate);
}

TEST_CASE("virtual best requires a common grid") {
    auto a = prof("a", 10.0, {0.5, 0.6});
    auto b = prof("a", 20.0, {0.5});
    CHECK_THROWS_AS(virtual_best({a, b}), std::invalid_argument);
    CHECK_THROWS_AS(virtual_best({}), std::invalid_argument);
}

TEST_CASE("fixed best, argmax of the aggregate") {
    // sweeps=10 mean: (0.8 + 0.2)/2 = 0.5 ; sweeps=30 mean: (0.4 + 0.7)/2 = 0.55
    const auto c = fixed_best({prof("a", 10.0, {0.8}), prof("b", 10.0, {0.2}),
                               prof("a", 30.0, {0.4}), prof("b", 30.0, {0.7})},
                              FixedBestMode::ArgmaxOfAggregate);
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0].params.values.at("sweeps") == 30.0);
    CHECK(c.points[0].score == doctest::Approx(0.55));
    CHECK(!c.points[0].needs_rerun);
}

TEST_CASE("fixed best, average of per-instance argmaxes flags unevaluated points") {
    // instance a prefers sweeps=10, instance b prefers sweeps=1000
    const auto c = fixed_best({prof("a", 10.0, {0.9}), prof("b", 10.0, {0.1}),
                               prof("a", 1000.0, {0.2}), prof("b", 1000.0, {0.8})},
                              FixedBestMode::AverageOfArgmax);
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0].params.values.at("sweeps") == 505.0);
    CHECK(c.points[0].needs_rerun);

    // unanimous argmax lands on an evaluated point and needs no rerun
    const auto u = fixed_best({prof("a", 10.0, {0.9}), prof("b", 10.0, {0.8}),
                               prof("a", 1000.0, {0.2}), prof("b", 1000.0, {0.1})},
                              FixedBestMode::AverageOfArgmax);
    CHECK(u.points[0].params.values.at("sweeps") == 10.0);
    CHECK(!u.points[0].needs_rerun);
}

TEST_CASE("explore exploit spends the budget exactly") {
    SearchSpace space;
    space.solver_id = "pt";
    space.dists["sweeps"] = DistUniform{10.0, 100.0};
    space.nominal = {{"sweeps", 50.0}};

    std::vector<std::pair<double, double>> calls;  // (sweeps, resource)
    const EvaluateFn eval = [&](const ParameterPoint& p, double r) {
        calls.emplace_back(p.values.at("sweeps"), r);
        return p.values.at("sweeps") / 100.0;  // larger sweeps score better
    };

    const auto res = explore_exploit(10.0, MetaParams{0.3, 1.0}, space, eval, 7);
    CHECK(!res.degenerate);
    CHECK(res.explored == 3);  // floor(0.3 * 10 / 1)
    REQUIRE(calls.size() == 4);
    for (int i = 0; i < 3; ++i) CHECK(calls[i].second == 1.0);
    CHECK(calls[3].second == 7.0);  // B - K*tau, exact
    // the incumbent is the best explored candidate
    double best = 0.0;
    for (int i = 0; i < 3; ++i) best = std::max(best, calls[i].first);
    CHECK(res.chosen.values.at("sweeps") == best);
    CHECK(calls[3].first == best);
    // trajectory: cumulative resources 1,2,3,10 with non-decreasing scores
    REQUIRE(res.trajectory.size() == 4);
    CHECK(res.trajectory[0].first == 1.0);
    CHECK(res.trajectory[2].first == 3.0);
    CHECK(res.trajectory.back().first == 10.0);  // budget identity, exact
    for (std::size_t i = 1; i < res.trajectory.size(); ++i)
        CHECK(res.trajectory[i].second >= res.trajectory[i - 1].second);
}

TEST_CASE("explore exploit degenerates to the nominal point") {
    SearchSpace space;
    space.solver_id = "pt";
    space.dists["sweeps"] = DistUniform{10.0, 100.0};
    space.nominal = {{"sweeps", 50.0}};
    int calls = 0;
    const EvaluateFn eval = [&](const ParameterPoint& p, double r) {
        ++calls;
        CHECK(p.values.at("sweeps") == 50.0);
        CHECK(r == 4.0);
        return 0.3;
    };
    const auto res = explore_exploit(4.0, MetaParams{0.1, 1.0}, space, eval, 1);  // K = floor(0.4)
    CHECK(res.degenerate);
    CHECK(res.explored == 0);
    CHECK(calls == 1);
    REQUIRE(res.trajectory.size() == 1);
    CHECK(res.trajectory[0] == std::pair{4.0, 0.3});
}

TEST_CASE("explore exploit replays identically for a fixed seed") {
    SearchSpace space;
    space.solver_id = "pt";
    space.dists["sweeps"] = DistLogUniform{10.0, 1000.0};
    space.nominal = {{"sweeps", 100.0}};
    const EvaluateFn eval = [](const ParameterPoint& p, double) {
        return -std::abs(p.values.at("sweeps") - 300.0);
    };
    const auto a = explore_exploit(20.0, MetaParams{0.5, 2.0}, space, eval, 11);
    const auto b = explore_exploit(20.0, MetaParams{0.5, 2.0}, space, eval, 11);
    CHECK(a.chosen == b.chosen);
    CHECK(a.trajectory == b.trajectory);
}

TEST_CASE("trajectory lookup is a left-continuous step function") {
    const std::vector<std::pair<double, double>> traj{{1.0, 0.2}, {2.0, 0.5}, {10.0, 0.9}};
    CHECK(trajectory_value_at(traj, 0.5) == 0.0);
    CHECK(trajectory_value_at(traj, 1.0) == 0.2);
    CHECK(trajectory_value_at(traj, 1.999) == 0.2);
    CHECK(trajectory_value_at(traj, 2.0) == 0.5);
    CHECK(trajectory_value_at(traj, 9.0) == 0.5);
    CHECK(trajectory_value_at(traj, 10.0) == 0.9);
    CHECK(trajectory_value_at(traj, 100.0) == 0.9);
}

TEST_CASE("meta sweep tabulates mean trajectories and picks the argmax") {
    const std::vector<MetaParams> meta_grid{{0.1, 1.0}, {0.5, 1.0}};
    ResourceGrid grid{{1.0, 4.0, 8.0}};
    const std::vector<std::string> ids{"a", "b"};

    // mock runner: score ramps to explore_frac at the full budget
    const auto run_ee = [](const std::string&, const MetaParams& m, double budget,
                           std::uint64_t) {
        ExploreExploitResult r;
        r.trajectory = {{budget / 2.0, m.explore_frac / 2.0}, {budget, m.explore_frac}};
        r.chosen = {"pt", {{"sweeps", 10.0}}};
        return r;
    };

    const auto res = meta_sweep(meta_grid, grid, ids, 3, 99, run_ee, 1);
    REQUIRE(res.mean_scores.size() == 2);
    const auto& lo = res.mean_scores.at(MetaParams{0.1, 1.0});
    const auto& hi = res.mean_scores.at(MetaParams{0.5, 1.0});
    // nothing completed by r=1, half-budget value at r=4, full at r=8
    const std::vector<double> lo_expect{0.0, 0.05, 0.1}, hi_expect{0.0, 0.25, 0.5};
    REQUIRE(lo.size() == 3);
    REQUIRE(hi.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(lo[i] == doctest::Approx(lo_expect[i]).epsilon(1e-12));
        CHECK(hi[i] == doctest::Approx(hi_expect[i]).epsilon(1e-12));
    }

    REQUIRE(res.best.points.size() == 3);
    CHECK(res.best.points[1].params.values.at("explore_frac") == 0.5);
    CHECK(res.best.points[2].params.values.at("explore_frac") == 0.5);
    CHECK(res.best.points[2].score == 0.5);
    CHECK(res.actionable.actionable);
    for (const auto& p : res.actionable.points) CHECK(!p.needs_rerun);
}

TEST_CASE("rolling median smoothing") {
    const auto smoothed = smooth_curve(curve_of({1.0, 9.0, 1.0, 1.0, 1.0}), 3);
    for (const auto& p : smoothed.points) CHECK(p.params.values.at("sweeps") == 1.0);

    // window 1 is the identity
    const auto same = smooth_curve(curve_of({3.0, 7.0, 2.0}), 1);
    CHECK(same.points[0].params.values.at("sweeps") == 3.0);
    CHECK(same.points[1].params.values.at("sweeps") == 7.0);
    CHECK(same.points[2].params.values.at("sweeps") == 2.0);

    CHECK_THROWS_AS(smooth_curve(curve_of({1.0, 2.0}), 2), std::invalid_argument);

    // constant fit replaces the series by its mean
    const auto fit = smooth_curve(curve_of({2.0, 2.0, 2.0, 8.0}), 1, FitFamily::Constant);
    for (const auto& p : fit.points)
        CHECK(p.params.values.at("sweeps") == doctest::Approx(3.5).epsilon(1e-12));

    // a constant series is invariant under every fit family
    for (auto family : {FitFamily::Constant, FitFamily::LinearInLogResource, FitFamily::PowerLaw}) {
        const auto c = smooth_curve(curve_of({4.0, 4.0, 4.0}), 3, family);
        for (const auto& p : c.points)
            CHECK(p.params.values.at("sweeps") == doctest::Approx(4.0).epsilon(1e-9));
    }

    // unevaluated smoothed points are flagged
    const std::vector<ParameterPoint> evaluated{{"pt", {{"sweeps", 1.0}}}};
    const auto flagged = smooth_curve(curve_of({1.0, 9.0, 1.0}), 1, FitFamily::None, &evaluated);
    CHECK(!flagged.points[0].needs_rerun);
    CHECK(flagged.points[1].needs_rerun);
    CHECK(!flagged.points[2].needs_rerun);
}

TEST_CASE("splits are disjoint, sized, and seeded") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("inst_" + std::to_string(i));
    const auto splits = make_splits(ids, 4, 0.8, 31);
    REQUIRE(splits.size() == 4);
    bool any_difference = false;
    for (const auto& s : splits) {
        CHECK(s.train_ids.size() == 8);
        CHECK(s.test_ids.size() == 2);
        std::set<std::string> all(s.train_ids.begin(), s.train_ids.end());
        all.insert(s.test_ids.begin(), s.test_ids.end());
        CHECK(all.size() == 10);  // disjoint and exhaustive
        if (s.test_ids != splits[0].test_ids) any_difference = true;
    }
    CHECK(any_difference);
    const auto replay = make_splits(ids, 4, 0.8, 31);
    for (std::size_t s = 0; s < 4; ++s) {
        CHECK(replay[s].train_ids == splits[s].train_ids);
        CHECK(replay[s].test_ids == splits[s].test_ids);
    }
    CHECK_THROWS_AS(make_splits({"a", "b"}, 2, 0.8, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_splits(ids, 2, 0.999, 0), std::invalid_argument);
}

TEST_CASE("cross validation identity on a single split") {
    SplitSpec split;
    split.train_ids = {"a"};
    split.test_ids = {"b"};
    const auto p = prof("b", 10.0, {0.4, 0.6});
    const auto agg = cross_validate({split}, Statistic::Mean, 200, 0.95, 5,
                                    [&](const SplitSpec&) {
                                        return std::vector<PerformanceProfile>{p};
                                    });
    REQUIRE(agg.points.size() == 2);
    CHECK(agg.points[0].estimate == 0.4);
    CHECK(agg.points[1].estimate == 0.6);
}

TEST_CASE("train-derived fixed curve never beats the test virtual best") {
    // disjoint train/test instances over two parameter points
    const std::vector<PerformanceProfile> train{
        prof("t1", 10.0, {0.7, 0.5}), prof("t1", 30.0, {0.3, 0.6}),
        prof("t2", 10.0, {0.6, 0.4}), prof("t2", 30.0, {0.2, 0.8})};
    const std::vector<PerformanceProfile> test{prof("x", 10.0, {0.1, 0.9}),
                                               prof("x", 30.0, {0.5, 0.2})};

    const auto curve = fixed_best(train, FixedBestMode::ArgmaxOfAggregate);
    const auto applied = apply_curve(curve, test);
    const auto vb = virtual_best(test).per_instance_profile.at("x");
    REQUIRE(applied.points.size() == vb.points.size());
    for (std::size_t gi = 0; gi < vb.points.size(); ++gi)
        CHECK(applied.points[gi].estimate <= vb.points[gi].estimate);
}

TEST_CASE("apply_curve demands evaluated points on a matching grid") {
    const std::vector<PerformanceProfile> test{prof("x", 10.0, {0.1, 0.9})};
    CHECK_THROWS_AS(apply_curve(curve_of({20.0, 20.0}), test), std::invalid_argument);
    const auto ok = apply_curve(curve_of({10.0, 10.0}), test);
    CHECK(ok.points[1].estimate == 0.9);
}

TEST_CASE("strategy csv layout") {
    auto c = curve_of({10.0, 20.0});
    c.points[1].needs_rerun = true;
    const auto path = std::filesystem::temp_directory_path() / "sbench_strategy.csv";
    write_strategy_csv(c, path);
    std::ifstream in(path);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header == "strategy,resource,param:sweeps,estimate,ci_low,ci_high,needs_rerun");
    CHECK(row0 == "fixed,1,10,0.5,0.5,0.5,0");
    CHECK(row1 == "fixed,2,20,0.5,0.5,0.5,1");
    std::filesystem::remove(path);
}

TEST_CASE("meta parameter validation") {
    CHECK_THROWS_AS((MetaParams{0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((MetaParams{1.5, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((MetaParams{0.5, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((MetaParams{1.0, 2.0}.validate()));
}
