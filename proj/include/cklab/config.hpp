#pragma once

#include "cklab/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cklab {

/// Fully specified experiment. JSON configs use the same flat keys as the
/// command-line flags (with '_' for '-'); unknown keys are rejected.
struct RunConfig {
    std::string subcommand;
    ChartParams chart;

    // check-exponents
    std::string p, q, s;
    // verify-strichartz
    std::string triple;  // "p,q,s"
    std::string dual;    // "p',q'"; empty: homogeneous run
    // harness and solver
    std::size_t ensemble = 50;
    std::uint64_t seed = 7;
    int steps = 1024;
    std::optional<double> t_max;  // default depends on the subcommand
    double t0 = 0.0;
    int record_every = 4;
    int modes = 0;
    bool refine = false;
    bool forcing = false;
    bool zero_data = false;
    // conjugation-test
    std::vector<int> grids{16, 32, 64};
    double x = 0.5;
    // semilinear
    std::optional<double> k;
    std::optional<double> epsilon;
    bool auto_epsilon = false;
    int max_iter = 25;
    double tol = 1e-8;
    std::vector<double> table_u;  // sampled nonlinearity (empty: pure power)
    std::vector<double> table_f;

    std::string output;   // CSV path; JSON summary alongside
    std::string out_dir;  // used when output is empty
};

[[nodiscard]] const std::vector<std::string>& subcommands();

/// Overlays the keys of `doc` onto `cfg`. Throws ConfigError on unknown keys,
/// wrong types, or a subcommand mismatch.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);
[[nodiscard]] RunConfig load_config_file(const std::string& path, RunConfig base);

/// Echo of every field, for the JSON summary.
[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& cfg);

[[nodiscard]] double default_t_max(const std::string& subcommand);
/// Comma-separated list.
[[nodiscard]] std::vector<std::string> split_list(const std::string& text);

}  // namespace cklab
