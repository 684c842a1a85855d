#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbench {

// Spin configuration, entries are +1 or -1.
struct SpinConfig {
    std::vector<std::int8_t> spins;

    int size() const { return static_cast<int>(spins.size()); }
    bool operator==(const SpinConfig&) const = default;
};

// One nonzero upper-triangle coupling (i < j).
struct Coupling {
    int i;
    int j;
    double value;
};

// Zero-field Ising problem: minimize s' J s over s in {-1,+1}^n.
// J is symmetric with zero diagonal; only the upper triangle is stored,
// with both halves visible through the adjacency lists.
class IsingInstance {
public:
    IsingInstance(int n, std::vector<Coupling> couplings,
                  std::optional<SpinConfig> planted = std::nullopt,
                  std::optional<double> ground_energy = std::nullopt,
                  std::map<std::string, std::string> meta = {});

    int n() const { return n_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    const std::vector<std::vector<std::pair<int, double>>>& adjacency() const { return adj_; }
    const std::optional<SpinConfig>& planted_state() const { return planted_; }
    const std::optional<double>& ground_energy() const { return ground_energy_; }
    const std::map<std::string, std::string>& meta() const { return meta_; }
    std::string id() const;

    // s' J s with both (i,j) and (j,i) terms counted.
    double energy(const SpinConfig& config) const;

    // energy(config with spin flipped) - energy(config), in O(degree).
    double delta_energy(const SpinConfig& config, int flip_index) const;

private:
    int n_;
    std::vector<Coupling> couplings_;                       // sorted, i < j
    std::vector<std::vector<std::pair<int, double>>> adj_;  // both directions
    std::optional<SpinConfig> planted_;
    std::optional<double> ground_energy_;
    std::map<std::string, std::string> meta_;
};

// Expected energy of a uniformly random configuration. Analytic: 0 for any
// zero-diagonal symmetric J, since E[s_i s_j] = 0 for i != j.
inline double random_baseline(const IsingInstance&) { return 0.0; }

// Projection of a real vector onto {-1,+1}; ties (x == 0) map to +1.
SpinConfig sign_config(const std::vector<double>& x);

// One solver shot.
struct SampleRecord {
    double energy = 0.0;
    std::optional<SpinConfig> config;
    double resource_cost = 0.0;  // reads consumed by this shot
    std::uint64_t shot_seed = 0;
    int best_found_at = 0;  // sweep round / integration step of first attainment
    bool diverged = false;
};

// Named assignment of solver parameters.
struct ParameterPoint {
    std::string solver_id;
    std::map<std::string, double> values;

    bool operator==(const ParameterPoint&) const = default;
    // Lexicographic; used for deterministic tie-breaking.
    bool operator<(const ParameterPoint& o) const;
};

// Stable 16-hex-digit hash of a parameter point (profile/file key).
std::string param_hash(const ParameterPoint& p);

// Raw output distribution of a solver run at maximal resource.
struct SampleSet {
    std::string instance_id;
    std::string solver_id;
    ParameterPoint params;
    std::vector<SampleRecord> records;
    double total_resource = 0.0;

    void validate() const;  // throws on empty set / resource mismatch
};

class dimension_error : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace sbench
