#include "sbench/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace sbench {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_instance(const IsingInstance& instance, const fs::path& path) {
    std::ostringstream out;
    out << "ising " << instance.n() << "\n";
    for (const auto& [k, v] : instance.meta()) out << "meta " << k << " " << v << "\n";
    if (instance.planted_state()) {
        out << "planted ";
        for (auto s : instance.planted_state()->spins) out << (s > 0 ? '+' : '-');
        out << " " << format_double(*instance.ground_energy()) << "\n";
    }
    for (const auto& c : instance.couplings())
        out << c.i << " " << c.j << " " << format_double(c.value) << "\n";
    atomic_write(path, out.str());
}

IsingInstance read_instance(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path.string());
    const std::string fname = path.string();

    std::string line;
    int lineno = 0;
    int n = -1;
    std::map<std::string, std::string> meta;
    std::optional<SpinConfig> planted;
    std::optional<double> ground;
    std::vector<Coupling> couplings;
    std::set<std::pair<int, int>> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (lineno == 1 || n < 0) {
            if (tok != "ising") throw parse_error(fname, lineno, "expected 'ising <n>' header");
            if (!(ls >> n) || n < 2) throw parse_error(fname, lineno, "invalid spin count");
            continue;
        }
        if (tok == "meta") {
            std::string key;
            if (!(ls >> key)) throw parse_error(fname, lineno, "meta line missing key");
            std::string value;
            std::getline(ls, value);
            if (!value.empty() && value[0] == ' ') value.erase(0, 1);
            meta[key] = value;
        } else if (tok == "planted") {
            std::string spins;
            double e;
            if (!(ls >> spins >> e)) throw parse_error(fname, lineno, "malformed planted line");
            if (static_cast<int>(spins.size()) != n)
                throw parse_error(fname, lineno, "planted string length does not match n");
            SpinConfig cfg;
            for (char c : spins) {
                if (c != '+' && c != '-') throw parse_error(fname, lineno, "planted string must be +/-");
                cfg.spins.push_back(c == '+' ? 1 : -1);
            }
            planted = cfg;
            ground = e;
        } else {
            int i, j;
            double v;
            std::istringstream cs(line);
            if (!(cs >> i >> j >> v)) throw parse_error(fname, lineno, "malformed coupling line");
            if (i == j) throw parse_error(fname, lineno, "diagonal coupling J_ii must be zero");
            if (i < 0 || j < 0 || i >= n || j >= n) throw parse_error(fname, lineno, "coupling index out of range");
            auto key = std::minmax(i, j);
            if (!seen.insert({key.first, key.second}).second)
                throw parse_error(fname, lineno, "duplicate coupling entry");
            couplings.push_back({i, j, v});
        }
    }
    if (n < 0) throw parse_error(fname, 1, "missing 'ising <n>' header");
    try {
        return IsingInstance(n, std::move(couplings), std::move(planted), ground, std::move(meta));
    } catch (const std::invalid_argument& e) {
        throw parse_error(fname, lineno, e.what());
    }
}

void write_sampleset(const SampleSet& set, const fs::path& path) {
    std::ostringstream out;
    out << "sampleset " << set.instance_id << " " << set.solver_id << "\n";
    for (const auto& [name, value] : set.params.values)
        out << "param " << name << " " << format_double(value) << "\n";
    for (const auto& r : set.records) {
        out << "record " << format_double(r.energy) << " " << format_double(r.resource_cost)
            << " " << r.shot_seed << " " << r.best_found_at << " " << (r.diverged ? 1 : 0);
        if (r.config) {
            out << " ";
            for (auto s : r.config->spins) out << (s > 0 ? '+' : '-');
        }
        out << "\n";
    }
    out << "total " << format_double(set.total_resource) << "\n";
    atomic_write(path, out.str());
}

SampleSet read_sampleset(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sample set file: " + path.string());
    const std::string fname = path.string();

    SampleSet set;
    std::string line;
    int lineno = 0;
    bool have_header = false, have_total = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "sampleset") {
            if (!(ls >> set.instance_id >> set.solver_id)) throw parse_error(fname, lineno, "malformed header");
            set.params.solver_id = set.solver_id;
            have_header = true;
        } else if (tok == "param") {
            std::string name;
            double value;
            if (!(ls >> name >> value)) throw parse_error(fname, lineno, "malformed param line");
            set.params.values[name] = value;
        } else if (tok == "record") {
            SampleRecord r;
            int diverged;
            if (!(ls >> r.energy >> r.resource_cost >> r.shot_seed >> r.best_found_at >> diverged))
                throw parse_error(fname, lineno, "malformed record line");
            r.diverged = diverged != 0;
            std::string spins;
            if (ls >> spins) {
                SpinConfig cfg;
                for (char c : spins) {
                    if (c != '+' && c != '-') throw parse_error(fname, lineno, "bad config string");
                    cfg.spins.push_back(c == '+' ? 1 : -1);
                }
                r.config = std::move(cfg);
            }
            set.records.push_back(std::move(r));
        } else if (tok == "total") {
            if (!(ls >> set.total_resource)) throw parse_error(fname, lineno, "malformed total line");
            have_total = true;
        } else {
            throw parse_error(fname, lineno, "unknown line tag '" + tok + "'");
        }
    }
    if (!have_header) throw parse_error(fname, 1, "missing sampleset header");
    if (!have_total) throw parse_error(fname, lineno, "missing total line");
    set.validate();
    return set;
}

}  // namespace sbench
