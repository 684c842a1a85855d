#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbench/config.hpp"

namespace sbench::pipeline {

// A required earlier stage has not produced its artifacts yet (exit code 3).
class missing_artifact_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit codes shared by all subcommands.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kMissingStage = 3;
inline constexpr int kSolverFailure = 4;

struct Options {
    bool force = false;
    int jobs = 1;
    std::optional<std::uint64_t> seed_override;
};

int cmd_gen(const Config& cfg, const Options& opt);
int cmd_run(const Config& cfg, const Options& opt);
int cmd_profile(const Config& cfg, const Options& opt);
int cmd_strategies(const Config& cfg, const Options& opt);
int cmd_report(const Config& cfg, const Options& opt);

}  // namespace sbench::pipeline
