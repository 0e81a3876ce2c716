#pragma once

#include "cklab/exponents.hpp"
#include "cklab/norms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cklab {

struct Resolution {
    int grid = 64;
    int steps = 1024;
    double t_max = 5.0;
    int record_every = 4;
    int modes = 0;  // 0: default_modes of the base grid
};

/// Refined resolution of a sweep: grid and steps doubled, t_max + 1, the
/// data band held fixed.
[[nodiscard]] Resolution refined(const Resolution& base, int base_modes);

struct HarnessOptions {
    Resolution resolution;
    double t0 = 0.0;
    std::size_t ensemble = 50;
    std::uint64_t seed = 7;
    bool refine = false;
    double data_scale = 1.0;
    double forcing_scale = 1.0;
    bool forcing = false;    // verify_energy only
    bool zero_data = false;  // verify_energy only
};

struct RunResult {
    std::size_t index = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool excluded = false;
    double drift = 0.0;  // verify_energy: max |E(x) - E(x0)| / E(x0)
};

struct RefinementDelta {
    Resolution resolution;
    double sup_ratio = 0.0;
    double relative_change = 0.0;
};

struct EstimateReport {
    std::string kind;  // homogeneous | inhomogeneous | energy
    std::string chart;
    std::optional<AdmissibleTriple> triple;
    std::optional<DualPair> dual;
    std::size_t ensemble = 0;
    std::uint64_t seed = 0;
    double t0 = 0.0;
    Resolution resolution;
    std::vector<RunResult> runs;  // sorted by index
    double sup_ratio = 0.0;
    double max_drift = 0.0;
    std::vector<RefinementDelta> refinement;
    std::vector<std::string> warnings;

    [[nodiscard]] bool all_finite() const;
};

/// Chart instance at the resolution and time window of a harness run:
/// x0 = e^{-t0}, x_min = e^{-t_max}.
[[nodiscard]] ChartParams instantiate(ChartParams chart, const Resolution& res, double t0);

/// Ratio ‖u‖_{L^p(W^{1-s,q})} / (e^{|t0|/2} ‖(u0,u1)‖_{H¹×L²}) over random
/// band-limited data.
[[nodiscard]] EstimateReport verify_homogeneous(const ChartParams& chart, const AdmissibleTriple& triple,
                                                const HarnessOptions& opts);

/// Zero data, random forcing: ‖u‖ / ‖f‖ in the dual mixed norm.
[[nodiscard]] EstimateReport verify_inhomogeneous(const ChartParams& chart, const AdmissibleTriple& triple,
                                                  const DualPair& dual, const HarnessOptions& opts);

/// max over nodes of E(x) / (E_full(x0) + ∫_x^{x0} ∫ |g|² dh dx) for the
/// reduced equation, E = kinetic + gradient, E_full adds ∫ |v|² dh.
[[nodiscard]] EstimateReport verify_energy(const ChartParams& chart, const HarnessOptions& opts);

}  // namespace cklab
