#include "sbench/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbench {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "': not a number: '" + s + "'");
    }
}

}  // namespace

Config Config::from_string(const std::string& text, const std::string& name) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(name + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(name + ":" + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path.string());
}

std::string Config::get_str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw config_error("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return to_double(get_str(key), key); }

double Config::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : to_double(it->second, key);
}

long long Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v) throw config_error("config key '" + key + "': expected integer");
    return i;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string s = get_str(key);
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "': expected unsigned integer, got '" + s + "'");
    }
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string s = get_str(key);
    std::vector<double> out;
    std::istringstream ls(s);
    std::string item;
    while (std::getline(ls, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_double(item, key));
    }
    if (out.empty()) throw config_error("config key '" + key + "': empty list");
    return out;
}

namespace {

// Parses "name(arg,arg,...)" where args are numbers or k=v pairs.
struct DistCall {
    std::string name;
    std::vector<double> positional;
    std::map<std::string, double> named;
};

DistCall parse_call(const std::string& text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw config_error("malformed dist spec: '" + text + "'");
    DistCall call;
    call.name = trim(text.substr(0, open));
    std::transform(call.name.begin(), call.name.end(), call.name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::string args = text.substr(open + 1, close - open - 1);
    std::istringstream as(args);
    std::string arg;
    while (std::getline(as, arg, ',')) {
        arg = trim(arg);
        if (arg.empty()) continue;
        auto eq = arg.find('=');
        if (eq == std::string::npos) {
            call.positional.push_back(to_double(arg, "dist arg"));
        } else {
            call.named[trim(arg.substr(0, eq))] = to_double(trim(arg.substr(eq + 1)), "dist arg");
        }
    }
    return call;
}

}  // namespace

ParamDist parse_dist(const std::string& text) {
    const DistCall call = parse_call(text);
    auto need2 = [&](const char* what) {
        if (call.positional.size() != 2)
            throw config_error(std::string(what) + " distribution needs (lo,hi): '" + text + "'");
    };
    if (call.name == "uniform") {
        need2("uniform");
        return DistUniform{call.positional[0], call.positional[1]};
    }
    if (call.name == "loguniform") {
        need2("loguniform");
        if (!(call.positional[0] > 0.0))
            throw config_error("loguniform lower bound must be positive: '" + text + "'");
        return DistLogUniform{call.positional[0], call.positional[1]};
    }
    if (call.name == "rounduniform") {
        need2("rounduniform");
        return DistRoundUniform{call.positional[0], call.positional[1]};
    }
    if (call.name == "truncnormal") {
        DistTruncNormal d{};
        auto get = [&](const std::string& k, double fallback, bool required) {
            auto it = call.named.find(k);
            if (it != call.named.end()) return it->second;
            if (required) throw config_error("truncnormal requires " + k + "=...: '" + text + "'");
            return fallback;
        };
        d.mean = get("mean", 0.0, true);
        d.sd = get("sd", 0.0, true);
        d.min = get("min", -std::numeric_limits<double>::infinity(), false);
        d.max = get("max", std::numeric_limits<double>::infinity(), false);
        if (!(d.sd > 0.0)) throw config_error("truncnormal sd must be positive: '" + text + "'");
        return d;
    }
    throw config_error("unknown distribution '" + call.name +
                       "' (known: uniform, loguniform, rounduniform, truncnormal)");
}

ParamSpec parse_param_spec(const std::string& text) {
    const std::string t = trim(text);
    if (t.rfind("dist:", 0) == 0) return parse_dist(t.substr(5));
    if (t.find(',') != std::string::npos) {
        std::vector<double> grid;
        std::istringstream ls(t);
        std::string item;
        while (std::getline(ls, item, ',')) {
            item = trim(item);
            if (!item.empty()) grid.push_back(to_double(item, "param grid"));
        }
        if (grid.empty()) throw config_error("empty param grid: '" + text + "'");
        return grid;
    }
    return to_double(t, "param value");
}

}  // namespace sbench
