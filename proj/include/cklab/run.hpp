#pragma once

#include "cklab/config.hpp"

#include <filesystem>
#include <iosfwd>

namespace cklab {

enum ExitCode : int { kPass = 0, kConfigError = 1, kAssertionFailure = 2 };

struct RunOutcome {
    int exit_code = kPass;
    std::filesystem::path csv;
    std::filesystem::path summary;
};

/// Executes one experiment, writes the CSV and its JSON summary, and prints a
/// short report to `out`. Configuration problems throw ConfigError.
[[nodiscard]] RunOutcome run(const RunConfig& cfg, std::ostream& out);

}  // namespace cklab
