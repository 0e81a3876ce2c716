#pragma once

#include "cklab/solver.hpp"

#include <cstdint>
#include <random>

namespace cklab {

/// Generator for run `index` of an ensemble; depends only on (master, index).
[[nodiscard]] std::mt19937_64 run_rng(std::uint64_t master, std::uint64_t index);

/// Canonical low-frequency basis on the cross-section grid. Zonal sphere: the
/// lowest eigenvectors of Δ_{h(x0)}, W-orthonormal, signed positive at the
/// north pole. Torus: Fourier modes cos(k·y), sin(k·y) ordered by |k|². The
/// ordering is stable under grid refinement, so the same coefficients describe
/// the same continuum function on every grid.
class BandBasis {
public:
    BandBasis(const MetricSpec& metric, int modes);

    [[nodiscard]] int modes() const { return static_cast<int>(basis_.cols()); }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const { return basis_; }
    [[nodiscard]] Field combine(const Field& coefficients) const { return basis_ * coefficients; }

private:
    Eigen::MatrixXd basis_;
};

/// Default band: the lowest third of the grid modes.
[[nodiscard]] int default_modes(const MetricSpec& metric);

/// Gaussian coefficients for (u0, u1), scaled so that
/// ‖u0‖_{H¹} + ‖u1‖_{L²} (against dh/x0^n) equals `norm`.
[[nodiscard]] PhysicalData sample_data(const MetricSpec& metric, const BandBasis& basis, std::mt19937_64& rng,
                                       double norm = 1.0);

/// Smooth random forcing of the original equation,
///   f(x, y) = x^{(n-1)/2 + 2} sum_{j,l} c_jl cos(l π x / x0) φ_j(y),
/// i.e. a band-limited O(1) right-hand side for the reduced equation.
class RandomForcing {
public:
    RandomForcing(const MetricSpec& metric, const BandBasis& basis, std::mt19937_64& rng, int time_modes = 4);

    [[nodiscard]] Field physical(double x) const;
    [[nodiscard]] Field reduced(double x) const;
    RandomForcing& operator*=(double c);

private:
    Eigen::MatrixXd spatial_;  // grid x modes
    Eigen::MatrixXd coef_;     // modes x time_modes
    double x0_;
    int n_;
};

/// Smooth jet v = a + x b + x² c at x with a, b, c fixed low-frequency
/// continuum functions drawn from `seed` (cos jθ for the zonal sphere,
/// cos(k·y + φ) on the torus), so grids of any size sample the same field.
[[nodiscard]] FieldJet smooth_jet(const MetricSpec& metric, std::uint64_t seed, double x);

}  // namespace cklab
