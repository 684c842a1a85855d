#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sbench/model.hpp"

namespace sbench {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Full-precision decimal rendering; round-trips doubles exactly.
std::string format_double(double v);

// Instance file format (line oriented):
//   ising <n>
//   meta <key> <value...>          (zero or more)
//   planted <+-string> <energy>    (optional)
//   <i> <j> <J_ij>                 (one per nonzero upper-triangle coupling)
void write_instance(const IsingInstance& instance, const std::filesystem::path& path);
IsingInstance read_instance(const std::filesystem::path& path);

// Sample set files, one record line per shot.
void write_sampleset(const SampleSet& set, const std::filesystem::path& path);
SampleSet read_sampleset(const std::filesystem::path& path);

// Writes to <path>.tmp then renames, so readers never observe partial files.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace sbench
