#include <cmath>
#include <map>

#include "doctest.h"
#include "sbench/pt.hpp"

using namespace sbench;

namespace {

// Unit triangle: every spin has min gap 2 and |field| bound 2.
IsingInstance unit_triangle() {
    return IsingInstance(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

}  // namespace

TEST_CASE("temperature bounds on the unit triangle") {
    const auto b = derive_temperatures(unit_triangle(), 0.1, 0.5);
    // dE_cold = 2, three spins attain the min gap; dE_hot = 4.
    CHECK(b.t_min == doctest::Approx(2.0 / std::log(30.0)).epsilon(1e-12));
    CHECK(b.t_min == doctest::Approx(0.58804).epsilon(1e-4));
    CHECK(b.t_max == doctest::Approx(4.0 / std::log(2.0)).epsilon(1e-12));
    CHECK(b.t_max == doctest::Approx(5.77078).epsilon(1e-4));
    CHECK(!b.swapped);

    // back-substitution: the bounds reproduce the requested flip probabilities
    CHECK(std::abs(3.0 * std::exp(-2.0 / b.t_min) - 0.1) < 1e-10);
    CHECK(std::abs(std::exp(-4.0 / b.t_max) - 0.5) < 1e-10);
}

TEST_CASE("temperature bounds error cases") {
    IsingInstance empty(2, {});
    CHECK_THROWS_AS(derive_temperatures(empty, 0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(derive_temperatures(unit_triangle(), 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(derive_temperatures(unit_triangle(), 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("inverted bounds are repaired and flagged") {
    IsingInstance pair(2, {{0, 1, 1.0}});
    const auto b = derive_temperatures(pair, 0.9, 0.01);
    CHECK(b.swapped);
    CHECK(b.t_min <= b.t_max);
}

TEST_CASE("geometric temperature ladder") {
    const auto l3 = temperature_ladder(1.0, 4.0, 3);
    REQUIRE(l3.size() == 3);
    CHECK(l3[0] == doctest::Approx(1.0));
    CHECK(l3[1] == doctest::Approx(2.0));
    CHECK(l3[2] == doctest::Approx(4.0));

    const auto l2 = temperature_ladder(1.0, 4.0, 2);
    REQUIRE(l2.size() == 2);
    CHECK(l2.front() == doctest::Approx(1.0));
    CHECK(l2.back() == doctest::Approx(4.0));

    const auto l1 = temperature_ladder(1.0, 4.0, 1);
    REQUIRE(l1.size() == 1);
    CHECK(l1[0] == doctest::Approx(1.0));
}

TEST_CASE("metropolis sweep accepts zero-delta moves and is greedy at T -> 0") {
    IsingInstance inst(3, {{0, 1, 1.0}, {0, 2, -1.0}});
    SpinConfig s{{1, 1, 1}};
    Rng rng(1);
    double e = inst.energy(s);
    e = metropolis_sweep(inst, s, 1e-300, rng, e);
    // spin 0: delta 0, accepted; spin 1: uphill, rejected; spin 2: downhill.
    CHECK(s.spins == std::vector<std::int8_t>{-1, 1, -1});
    CHECK(e == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(e == doctest::Approx(inst.energy(s)).epsilon(1e-12));
}

TEST_CASE("metropolis sweep never increases energy at T -> 0") {
    Rng init(3);
    std::vector<Coupling> cs;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) cs.push_back({i, j, init.uniform(-1.0, 1.0)});
    IsingInstance inst(8, cs);
    SpinConfig s;
    for (int i = 0; i < 8; ++i) s.spins.push_back(init.bernoulli(0.5) ? 1 : -1);
    Rng rng(4);
    double e = inst.energy(s);
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double e2 = metropolis_sweep(inst, s, 1e-12, rng, e);
        CHECK(e2 <= e + 1e-12);
        e = e2;
    }
    CHECK(e == doctest::Approx(inst.energy(s)).epsilon(1e-9));
}

TEST_CASE("long metropolis chain samples the boltzmann distribution") {
    IsingInstance inst(3, {{0, 1, 1.0}, {0, 2, 0.5}, {1, 2, -0.7}});
    const double temp = 2.0;

    // exact distribution over the 8 configurations
    std::map<int, double> exact;
    double z = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        SpinConfig s;
        for (int i = 0; i < 3; ++i) s.spins.push_back((mask >> i) & 1 ? 1 : -1);
        const double w = std::exp(-inst.energy(s) / temp);
        exact[mask] = w;
        z += w;
    }
    for (auto& [mask, w] : exact) w /= z;

    SpinConfig s{{1, 1, 1}};
    Rng rng(9);
    double e = inst.energy(s);
    std::map<int, double> counts;
    const int n_sweeps = 100000;
    for (int sweep = 0; sweep < n_sweeps; ++sweep) {
        e = metropolis_sweep(inst, s, temp, rng, e);
        int mask = 0;
        for (int i = 0; i < 3; ++i)
            if (s.spins[i] == 1) mask |= 1 << i;
        counts[mask] += 1.0 / n_sweeps;
    }
    double tv = 0.0;
    for (const auto& [mask, p] : exact) tv += 0.5 * std::abs(p - counts[mask]);
    CHECK(tv < 0.02);
}

TEST_CASE("replica swap probability") {
    CHECK(replica_swap_probability(1.0, 2.0, -2.0, 0.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(replica_swap_probability(1.0, 2.0, -2.0, 0.0) == doctest::Approx(0.36788).epsilon(1e-4));
    // favorable exchanges always accepted
    CHECK(replica_swap_probability(1.0, 2.0, 0.0, -2.0) == 1.0);
    // symmetric under exchanging the two slots
    CHECK(replica_swap_probability(2.0, 1.0, 0.0, -2.0) ==
          doctest::Approx(replica_swap_probability(1.0, 2.0, -2.0, 0.0)).epsilon(1e-12));
}

TEST_CASE("pt parameter validation") {
    CHECK_THROWS_AS((PtParams{0, 10, 0.1, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PtParams{2, 0, 0.1, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PtParams{2, 10, 0.0, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PtParams{2, 10, 0.1, 1.5}.validate()), std::invalid_argument);
    CHECK_NOTHROW((PtParams{2, 10, 0.1, 0.5}.validate()));
    CHECK(clamp_probability(0.0) == 1e-6);
    CHECK(clamp_probability(1.0) == 1.0 - 1e-6);
    CHECK(clamp_probability(0.3) == 0.3);
}

TEST_CASE("pt solves a ferromagnetic pair every shot") {
    IsingInstance pair(2, {{0, 1, 1.0}});
    const auto set = run_pt(pair, {2, 20, 0.1, 0.5}, 25, 123);
    REQUIRE(set.records.size() == 25);
    for (const auto& r : set.records) {
        CHECK(r.energy == -2.0);
        REQUIRE(r.config.has_value());
        CHECK(pair.energy(*r.config) == -2.0);
        CHECK(r.resource_cost == 2.0 * 20.0);
        CHECK(!r.diverged);
    }
    CHECK(set.total_resource == 25.0 * 40.0);
    CHECK_NOTHROW(set.validate());
}

TEST_CASE("pt runs are bit-identical for a fixed seed") {
    const auto insts = [] {
        Rng r(31);
        std::vector<Coupling> cs;
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j) cs.push_back({i, j, r.uniform(-1.0, 1.0)});
        return IsingInstance(10, cs);
    }();
    const auto a = run_pt(insts, {4, 50, 0.1, 0.5}, 10, 555);
    const auto b = run_pt(insts, {4, 50, 0.1, 0.5}, 10, 555);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].energy == b.records[k].energy);
        CHECK(a.records[k].shot_seed == b.records[k].shot_seed);
        CHECK(a.records[k].config == b.records[k].config);
    }
    const auto c = run_pt(insts, {4, 50, 0.1, 0.5}, 10, 556);
    bool any_diff = false;
    for (std::size_t k = 0; k < a.records.size(); ++k)
        if (a.records[k].energy != c.records[k].energy || a.records[k].config != c.records[k].config)
            any_diff = true;
    CHECK(any_diff);
}
