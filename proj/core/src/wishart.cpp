#include "sbench/wishart.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sbench/rng.hpp"

namespace sbench {

int WishartSpec::rows() const {
    // round half away from zero
    return static_cast<int>(std::llround(alpha * n));
}

void WishartSpec::validate() const {
    if (n < 2) throw std::invalid_argument("WishartSpec: n must be >= 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("WishartSpec: alpha must be in (0,1]");
    if (count < 1) throw std::invalid_argument("WishartSpec: count must be >= 1");
    if (rows() < 1) throw std::invalid_argument("WishartSpec: round(alpha*n) < 1, degenerate ratio");
}

namespace {

IsingInstance generate_one(const WishartSpec& spec, int index) {
    const int n = spec.n;
    const int m = spec.rows();
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(index)));

    // Planted state: all-+1 under a uniformly random gauge.
    SpinConfig planted;
    planted.spins.resize(n);
    for (int i = 0; i < n; ++i) planted.spins[i] = rng.bernoulli(0.5) ? 1 : -1;

    // Gaussian rows projected orthogonal to the planted state: W s* = 0.
    std::vector<std::vector<double>> w(m, std::vector<double>(n));
    for (int r = 0; r < m; ++r) {
        auto& row = w[r];
        for (int c = 0; c < n; ++c) row[c] = rng.normal();
        double dot = 0.0;
        for (int c = 0; c < n; ++c) dot += row[c] * planted.spins[c];
        const double proj = dot / n;
        for (int c = 0; c < n; ++c) row[c] -= proj * planted.spins[c];
    }

    // J = (1/n) W'W with zero diagonal. s'Js = (||W s||^2 - tr(W'W)) / n,
    // so the planted nullspace vector is the global minimizer.
    std::vector<Coupling> couplings;
    couplings.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = 0.0;
            for (int r = 0; r < m; ++r) v += w[r][i] * w[r][j];
            v /= n;
            if (v != 0.0) couplings.push_back({i, j, v});
        }
    }

    char buf[128];
    std::snprintf(buf, sizeof(buf), "wishart_n%d_a%g_s%llu_k%d", n, spec.alpha,
                  static_cast<unsigned long long>(spec.seed), index);
    std::map<std::string, std::string> meta;
    meta["id"] = buf;
    meta["generator"] = "wishart";
    std::snprintf(buf, sizeof(buf), "%.17g", spec.alpha);
    meta["wishart_alpha"] = buf;
    meta["seed"] = std::to_string(spec.seed);
    meta["index"] = std::to_string(index);

    IsingInstance shell(n, couplings);  // compute exact planted energy first
    const double ground = shell.energy(planted);
    return IsingInstance(n, std::move(couplings), std::move(planted), ground, std::move(meta));
}

}  // namespace

std::vector<IsingInstance> generate_wishart(const WishartSpec& spec) {
    spec.validate();
    std::vector<IsingInstance> out;
    out.reserve(spec.count);
    for (int k = 0; k < spec.count; ++k) out.push_back(generate_one(spec, k));
    return out;
}

}  // namespace sbench
