#include <cmath>

#include "doctest.h"
#include "sbench/cim.hpp"

using namespace sbench;

namespace {

const CimParams kNominal{0.25, 0.002, 0.08, -10.0};

CimFixedParams quiet_fixed() {
    CimFixedParams f;
    f.noise = 0.0;
    return f;
}

}  // namespace

TEST_CASE("target amplitude modulation") {
    CHECK(modulate_target(0.25, 5.0, 10.0, 0.0) == 0.25);
    CHECK(modulate_target(0.25, 5.0, 10.0, 0.05) ==
          doctest::Approx(0.25 + 5.0 * std::tanh(0.5)).epsilon(1e-12));
    CHECK(modulate_target(0.25, 5.0, 10.0, 0.05) == doctest::Approx(2.560586).epsilon(1e-5));
    // saturates at alpha +- rho
    CHECK(modulate_target(0.25, 5.0, 10.0, 1e9) == doctest::Approx(5.25).epsilon(1e-12));
    CHECK(modulate_target(0.25, 5.0, 10.0, -1e9) == doctest::Approx(-4.75).epsilon(1e-12));
}

TEST_CASE("one euler step against hand-computed values") {
    IsingInstance inst(2, {{0, 1, 0.5}});
    CimFixedParams fixed = quiet_fixed();
    fixed.dt = 0.01;

    CimState st;
    st.x = {0.2, -0.3};
    st.e = {1.0, 1.0};
    st.t = 1.0;
    st.best_energy = -1.0;
    st.best_config = SpinConfig{{1, -1}};
    st.sign_energy = -1.0;  // energy(sign(x)) = 2 * 0.5 * (+1)(-1)

    Rng rng(0);
    REQUIRE(cac_step(st, inst, kNominal, fixed, rng));

    // dH = 0 so a = 0.25; xi = 0.08 * (1.0 - 0) = 0.08
    // dx0 = -11*0.2 - 0.5*0.2^3 + 0.002*1*(0.5*-0.3) = -2.2043
    // dx1 = -11*-0.3 - 0.5*(-0.3)^3 + 0.002*1*(0.5*0.2) = 3.3137
    CHECK(st.x[0] == doctest::Approx(0.2 - 0.01 * 2.2043).epsilon(1e-12));
    CHECK(st.x[1] == doctest::Approx(-0.3 + 0.01 * 3.3137).epsilon(1e-12));
    // de_i = -0.08 * (x_i^2 - 0.25)
    CHECK(st.e[0] == doctest::Approx(1.0 + 0.01 * 0.08 * (0.25 - 0.04)).epsilon(1e-12));
    CHECK(st.e[1] == doctest::Approx(1.0 + 0.01 * 0.08 * (0.25 - 0.09)).epsilon(1e-12));
    CHECK(st.t == doctest::Approx(1.01));
    CHECK(st.step == 1);
    // signs unchanged and energy already at best; best must not move
    CHECK(st.best_energy == -1.0);
    CHECK(st.best_found_at == 0);
}

TEST_CASE("origin is a fixed point of the noiseless flow") {
    IsingInstance inst(2, {{0, 1, 1.0}});
    CimFixedParams fixed = quiet_fixed();
    CimState st;
    st.x = {0.0, 0.0};
    st.e = {1.0, 1.0};
    st.best_config = SpinConfig{{1, 1}};
    st.best_energy = inst.energy(st.best_config);
    st.sign_energy = st.best_energy;
    Rng rng(0);
    for (int k = 0; k < 100; ++k) REQUIRE(cac_step(st, inst, kNominal, fixed, rng));
    CHECK(st.x[0] == 0.0);
    CHECK(st.x[1] == 0.0);
}

TEST_CASE("zero ramp rate freezes the error variables") {
    IsingInstance inst(2, {{0, 1, 1.0}});
    CimParams p = kNominal;
    p.gamma = 0.0;
    CimFixedParams fixed = quiet_fixed();
    Rng rng(5);
    CimState st = cim_init(inst, fixed, rng);
    st.x = {0.3, -0.2};
    for (int k = 0; k < 50; ++k) REQUIRE(cac_step(st, inst, p, fixed, rng));
    CHECK(st.e[0] == 1.0);
    CHECK(st.e[1] == 1.0);
}

TEST_CASE("best energy is non-increasing along a trajectory") {
    Rng gen(11);
    std::vector<Coupling> cs;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) cs.push_back({i, j, gen.uniform(-1.0, 1.0)});
    IsingInstance inst(8, cs);
    CimFixedParams fixed;
    Rng rng(12);
    CimState st = cim_init(inst, fixed, rng);
    double prev = st.best_energy;
    for (int k = 0; k < 2000; ++k) {
        REQUIRE(cac_step(st, inst, kNominal, fixed, rng));
        CHECK(st.best_energy <= prev);
        CHECK(st.best_energy <= st.sign_energy);
        prev = st.best_energy;
    }
}

TEST_CASE("nominal parameters solve a ferromagnetic pair") {
    IsingInstance pair(2, {{0, 1, 1.0}});
    CimFixedParams fixed;  // nominal, noise 0.5, 5000 steps
    const auto set = run_cim(pair, kNominal, fixed, 10, 77);
    REQUIRE(set.records.size() == 10);
    for (const auto& r : set.records) {
        CHECK(r.energy == -2.0);
        CHECK(!r.diverged);
        CHECK(r.resource_cost == 5000.0);
        REQUIRE(r.config.has_value());
        CHECK(pair.energy(*r.config) == -2.0);
    }
    CHECK(set.total_resource == 50000.0);
}

TEST_CASE("runaway pump is caught, restarted, and flagged") {
    IsingInstance pair(2, {{0, 1, 1.0}});
    CimParams p = kNominal;
    p.pump = 1000.0;  // exponential blow-up within a few steps
    CimFixedParams fixed;
    fixed.steps = 200;
    const auto set = run_cim(pair, p, fixed, 3, 9);
    for (const auto& r : set.records) {
        CHECK(r.diverged);
        CHECK(std::isfinite(r.energy));  // best seen before divergence
    }
}

TEST_CASE("cim runs are bit-identical for a fixed seed") {
    IsingInstance inst(4, {{0, 1, 0.7}, {1, 2, -0.4}, {2, 3, 0.9}, {0, 3, -0.2}});
    CimFixedParams fixed;
    fixed.steps = 500;
    const auto a = run_cim(inst, kNominal, fixed, 6, 2024);
    const auto b = run_cim(inst, kNominal, fixed, 6, 2024);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].energy == b.records[k].energy);
        CHECK(a.records[k].config == b.records[k].config);
        CHECK(a.records[k].shot_seed == b.records[k].shot_seed);
    }
}

TEST_CASE("fixed parameter validation") {
    CimFixedParams f;
    f.dt = 0.0;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f = CimFixedParams{};
    f.steps = 0;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f = CimFixedParams{};
    f.noise = -0.1;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}
