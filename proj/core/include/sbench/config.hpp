#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sbench/strategies.hpp"

namespace sbench {

class config_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value configuration; '#' starts a comment.
class Config {
public:
    static Config load(const std::filesystem::path& path);
    static Config from_string(const std::string& text, const std::string& name = "<string>");

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;  // comma separated

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

private:
    std::map<std::string, std::string> kv_;
};

// A param.* value: a fixed scalar, an explicit grid, or a sampling
// distribution (`dist:` grammar, e.g. dist:loguniform(1,10000) or
// dist:truncnormal(mean=50,sd=10,min=0.1)).
using ParamSpec = std::variant<double, std::vector<double>, ParamDist>;

ParamSpec parse_param_spec(const std::string& text);
ParamDist parse_dist(const std::string& text);

}  // namespace sbench
