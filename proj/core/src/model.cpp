#include "sbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sbench/rng.hpp"

namespace sbench {

IsingInstance::IsingInstance(int n, std::vector<Coupling> couplings,
                             std::optional<SpinConfig> planted,
                             std::optional<double> ground_energy,
                             std::map<std::string, std::string> meta)
    : n_(n),
      couplings_(std::move(couplings)),
      planted_(std::move(planted)),
      ground_energy_(std::move(ground_energy)),
      meta_(std::move(meta)) {
    if (n_ < 2) throw std::invalid_argument("IsingInstance: n must be >= 2");
    for (auto& c : couplings_) {
        if (c.i == c.j) throw std::invalid_argument("IsingInstance: nonzero diagonal J_ii");
        if (c.i > c.j) std::swap(c.i, c.j);
        if (c.i < 0 || c.j >= n_) throw std::invalid_argument("IsingInstance: coupling index out of range");
    }
    std::sort(couplings_.begin(), couplings_.end(),
              [](const Coupling& a, const Coupling& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t k = 1; k < couplings_.size(); ++k) {
        if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
            throw std::invalid_argument("IsingInstance: duplicate coupling entry");
    }
    adj_.assign(n_, {});
    for (const auto& c : couplings_) {
        adj_[c.i].emplace_back(c.j, c.value);
        adj_[c.j].emplace_back(c.i, c.value);
    }
    if (planted_) {
        if (planted_->size() != n_) throw dimension_error("IsingInstance: planted state length mismatch");
        for (auto s : planted_->spins)
            if (s != 1 && s != -1) throw std::invalid_argument("IsingInstance: planted spins must be +-1");
        if (!ground_energy_) throw std::invalid_argument("IsingInstance: planted state requires ground_energy");
        if (*ground_energy_ != energy(*planted_))
            throw std::invalid_argument("IsingInstance: ground_energy does not equal energy(planted_state)");
    }
}

std::string IsingInstance::id() const {
    auto it = meta_.find("id");
    return it != meta_.end() ? it->second : std::string("anonymous");
}

double IsingInstance::energy(const SpinConfig& config) const {
    if (config.size() != n_) throw dimension_error("energy: config length mismatch");
    double e = 0.0;
    for (const auto& c : couplings_)
        e += 2.0 * c.value * config.spins[c.i] * config.spins[c.j];
    return e;
}

double IsingInstance::delta_energy(const SpinConfig& config, int flip_index) const {
    if (config.size() != n_) throw dimension_error("delta_energy: config length mismatch");
    if (flip_index < 0 || flip_index >= n_) throw std::out_of_range("delta_energy: flip index out of range");
    double field = 0.0;
    for (const auto& [j, v] : adj_[flip_index]) field += v * config.spins[j];
    return -4.0 * config.spins[flip_index] * field;
}

SpinConfig sign_config(const std::vector<double>& x) {
    SpinConfig c;
    c.spins.reserve(x.size());
    for (double v : x) c.spins.push_back(v < 0.0 ? -1 : 1);
    return c;
}

bool ParameterPoint::operator<(const ParameterPoint& o) const {
    if (solver_id != o.solver_id) return solver_id < o.solver_id;
    return values < o.values;
}

std::string param_hash(const ParameterPoint& p) {
    std::string canon = p.solver_id;
    char buf[64];
    for (const auto& [name, value] : p.values) {
        std::snprintf(buf, sizeof(buf), "|%s=%.17g", name.c_str(), value);
        canon += buf;
    }
    std::uint64_t h = fnv1a(canon.data(), canon.size());
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void SampleSet::validate() const {
    if (records.empty()) throw std::invalid_argument("SampleSet: empty");
    double sum = 0.0;
    for (const auto& r : records) {
        if (r.resource_cost <= 0.0) throw std::invalid_argument("SampleSet: nonpositive resource cost");
        sum += r.resource_cost;
    }
    if (std::abs(sum - total_resource) > 1e-9 * std::max(1.0, std::abs(sum)))
        throw std::invalid_argument("SampleSet: total_resource mismatch");
}

}  // namespace sbench
