#pragma once

#include <cstdint>
#include <vector>

#include "sbench/model.hpp"

namespace sbench {

// Wishart planted ensemble: hardness ratio alpha = rows/columns.
struct WishartSpec {
    int n = 0;
    double alpha = 0.5;
    std::uint64_t seed = 0;
    int count = 1;

    int rows() const;  // round(alpha * n), half away from zero
    void validate() const;
};

// Generates `count` planted instances. Instance k uses the substream seed
// mix(seed, k); the planted state is a random gauge of all-+1, the coupling
// matrix is (1/n) W'W with zero diagonal where the Gaussian rows of W are
// projected orthogonal to the planted state, so the planted state minimizes
// s' J s with energy -(1/n) tr(W'W).
std::vector<IsingInstance> generate_wishart(const WishartSpec& spec);

}  // namespace sbench
