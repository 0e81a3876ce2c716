#pragma once

#include "cklab/field.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cklab {

enum class CrossSection {
    ZonalSphere,  // polar angle only, theta in (0, pi)
    Torus,        // [0, 2pi)^n with periodic wrap; n = 1 is the periodic interval
};

/// Coordinates of a cross-section point: theta for the zonal sphere, the n
/// angles for the torus.
using Point = std::array<double, 4>;
using CoefficientFn = std::function<double(const Point&)>;

/// One diagonal entry of h in the chart frame,
///   h_k(x, y) = h0(y) + x * linear(y) + x^2 * sum_j h1[j](y) x^j.
/// For the zonal sphere, component 0 is d theta^2 and component 1 multiplies
/// sin^2(theta) dω^2 on S^{n-1} (multiplicity n-1).
struct ComponentDef {
    CoefficientFn h0;
    CoefficientFn linear;  // empty: no linear term
    std::vector<CoefficientFn> h1;
    int multiplicity = 1;
};

struct MetricDefinition {
    std::string name;
    int n = 3;
    CrossSection section = CrossSection::ZonalSphere;
    int grid = 64;  // cells per dimension
    double x0 = 1.0;
    double x_min = 0.0024787521766663585;  // e^{-6}
    int x_samples = 1024;                  // resolution of x-checks on [0, x0]
    std::vector<ComponentDef> components;
};

/// Face-based graph of the discrete Laplacian. Entry e of row i couples cell i
/// to col[e] through face face_of[e].
struct StencilPattern {
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<int> face_of;
    std::vector<int> face_a;
    std::vector<int> face_b;
};

/// Discrete positive Laplacian at one x:
///   (Δ u)_i = (1 / W_i) sum_f c_f (u_i - u_j),
/// symmetric in the inner product sum_i W_i u_i w_i (the quadrature of dh).
struct Stencil {
    std::shared_ptr<const StencilPattern> pattern;
    Field weight;       // W_i, quadrature weights of dh
    Field conductance;  // c_f per face

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(weight.size()); }
    [[nodiscard]] Field apply(const Field& u) const;
    /// u^T K u = ∫ |∇u|_h^2 dh.
    [[nodiscard]] double dirichlet(const Field& u) const;
    /// ∫ u w dh.
    [[nodiscard]] double inner(const Field& u, const Field& w) const;
    /// Dense Δ = W^{-1} K.
    [[nodiscard]] Eigen::MatrixXd dense() const;
    /// Dense symmetric W^{-1/2} K W^{-1/2}.
    [[nodiscard]] Eigen::MatrixXd symmetric_dense() const;
};

/// Asymptotically de Sitter metric -dx^2 + h(x, y, dy) over x^2 in the
/// boundary chart, tabulated on the cross-section grid. Immutable once
/// constructed; construction validates positivity on [x_min, x0].
class MetricSpec {
public:
    explicit MetricSpec(MetricDefinition def);

    [[nodiscard]] const std::string& name() const { return def_.name; }
    [[nodiscard]] int n() const { return def_.n; }
    [[nodiscard]] CrossSection section() const { return def_.section; }
    [[nodiscard]] int grid() const { return def_.grid; }
    [[nodiscard]] int dims() const { return section() == CrossSection::Torus ? def_.n : 1; }
    [[nodiscard]] std::size_t size() const { return cells_.size(); }
    [[nodiscard]] double x0() const { return def_.x0; }
    [[nodiscard]] double x_min() const { return def_.x_min; }
    [[nodiscard]] int x_samples() const { return def_.x_samples; }
    [[nodiscard]] const MetricDefinition& definition() const { return def_; }
    [[nodiscard]] const std::vector<Point>& cells() const { return cells_; }
    [[nodiscard]] double spacing() const { return spacing_; }

    [[nodiscard]] bool has_linear_term() const;
    [[nodiscard]] bool x_independent() const;

    /// h_k(x, ·) at the cell centres.
    [[nodiscard]] Field component(int k, double x) const;
    [[nodiscard]] Stencil stencil(double x) const;
    /// √det h(x, y) at cell centres, including the zonal (sin θ)^{n-1} factor
    /// (cell-averaged). The S^{n-1} area constant is omitted.
    [[nodiscard]] Field density(double x) const;
    /// ∂_x log √det h, from the closed-form derivative of the components.
    [[nodiscard]] Field log_density_derivative(double x) const;
    /// ∂_x log √det h / x. Finite at x = 0 exactly when there is no linear term.
    [[nodiscard]] Field log_density_derivative_over_x(double x) const;
    /// Component values at every cell and face (cells first), one Field per
    /// component.
    [[nodiscard]] std::vector<Field> all_entries(double x) const;

    /// Sets every cell to f(cell point).
    [[nodiscard]] Field sample(const std::function<double(const Point&)>& f) const;

private:
    struct Table {
        // coef[power][point]; point index runs over cells then faces
        std::vector<Eigen::VectorXd> coef;
        int multiplicity = 1;
    };

    void build_grid();
    void tabulate();
    void validate() const;
    [[nodiscard]] Eigen::VectorXd eval(const Table& t, double x) const;
    [[nodiscard]] Eigen::VectorXd eval_dx(const Table& t, double x) const;
    [[nodiscard]] Eigen::VectorXd eval_dx_over_x(const Table& t, double x) const;

    MetricDefinition def_;
    std::vector<Point> cells_;
    std::vector<Point> faces_;
    std::vector<int> face_dir_;  // component index the face flux uses
    std::shared_ptr<StencilPattern> pattern_;
    Field zonal_cell_;  // ∫_cell sin^{n-1} θ dθ  (or the cell volume for the torus)
    Field zonal_face_;  // sin^{n-1} θ_f * (cell measure / spacing^2) for the flux
    std::vector<Table> tables_;
    double spacing_ = 0.0;
};

/// Result of the assumption-(A) gate.
struct ShortRangeVerdict {
    bool pass = false;
    double max_linear_coefficient = 0.0;
};

/// One-sided second-order estimate of ∂h/∂x at x = 0 over every grid point;
/// passes iff the largest entry magnitude is <= tol. Throws ConfigError when
/// [0, x0] is too coarsely sampled to form the difference.
[[nodiscard]] ShortRangeVerdict check_short_range(const MetricSpec& spec, double tol);

/// √det h on the grid at x in [x_min, x0]; DomainError otherwise.
[[nodiscard]] Field volume_density(const MetricSpec& spec, double x);

/// Largest |h(x+δ) - 2h(x) + h(x-δ)| / δ^2 over sampled x in [0, x0] (C^2 proxy).
[[nodiscard]] double second_difference_bound(const MetricSpec& spec);

// Built-in charts. x is the chart coordinate itself (unit normalization).

/// de Sitter: h = ¼(x²+1)² dω² on S^n, zonal reduction.
[[nodiscard]] MetricDefinition desitter_chart(int n, int grid, double x0, double x_min);
/// Exact product h = h0 with the round sphere (zonal) or the flat torus.
[[nodiscard]] MetricDefinition product_chart(int n, int grid, CrossSection section, double x0, double x_min);
/// Flat torus with h_k = 1 + amplitude x² (1 + ½ cos(y_1 + ... + y_n)).
[[nodiscard]] MetricDefinition torus_perturbed_chart(int n, int grid, double amplitude, double x0, double x_min);
/// Adds x * amplitude * h0 to every component (violates assumption (A)).
[[nodiscard]] MetricDefinition with_linear_term(MetricDefinition def, double amplitude);


/// Named chart with its resolution; rebuildable at another grid or x-range.
///   desitter         de Sitter, zonal
///   product          exact product, zonal sphere or torus
///   torus-perturbed  torus_perturbed_chart(amplitude)
///   custom           y-independent components, custom[k] = polynomial
///                    coefficients of h_k in x (index 1 is the linear term);
///                    zonal: {dθ² factor, sphere factor}, torus: n entries
/// linear_amplitude != 0 applies with_linear_term.
struct ChartParams {
    std::string name = "desitter";
    int n = 3;
    CrossSection section = CrossSection::ZonalSphere;
    int grid = 64;
    double x0 = 1.0;
    double x_min = 0.0024787521766663585;
    double amplitude = 0.5;
    double linear_amplitude = 0.0;
    std::vector<std::vector<double>> custom;
};

/// Throws ConfigError for an unknown name or inconsistent parameters.
[[nodiscard]] MetricDefinition make_chart(const ChartParams& params);
[[nodiscard]] const char* section_name(CrossSection section);
[[nodiscard]] CrossSection parse_section(const std::string& name);

}  // namespace cklab
