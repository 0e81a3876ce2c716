#include "cklab/geometry.hpp"

#include "cklab/errors.hpp"
#include "cklab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cklab {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

double integrate_sin_power(double a, double b, int power) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
        acc += kGaussWeights[k] * std::pow(std::sin(mid + half * kGaussNodes[k]), power);
    }
    return acc * half;
}

CoefficientFn constant(double c) {
    return [c](const Point&) { return c; };
}

}  // namespace

// --- Stencil ---------------------------------------------------------------

Field Stencil::apply(const Field& u) const {
    Field out(u.size());
    kernels::laplacian_apply(*pattern, {weight.data(), size()}, {conductance.data(), (std::size_t)conductance.size()},
                             {u.data(), (std::size_t)u.size()}, {out.data(), (std::size_t)out.size()});
    return out;
}

double Stencil::dirichlet(const Field& u) const {
    return kernels::dirichlet(*pattern, {conductance.data(), (std::size_t)conductance.size()},
                              {u.data(), (std::size_t)u.size()});
}

double Stencil::inner(const Field& u, const Field& w) const { return (weight.array() * u.array() * w.array()).sum(); }

Eigen::MatrixXd Stencil::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t f = 0; f < pattern->face_a.size(); ++f) {
        const int a = pattern->face_a[f];
        const int b = pattern->face_b[f];
        const double c = conductance[static_cast<Eigen::Index>(f)];
        k(a, a) += c;
        k(b, b) += c;
        k(a, b) -= c;
        k(b, a) -= c;
    }
    return weight.cwiseInverse().asDiagonal() * k;
}

Eigen::MatrixXd Stencil::symmetric_dense() const {
    const Field s = weight.cwiseSqrt();
    Eigen::MatrixXd m = s.asDiagonal() * dense() * s.cwiseInverse().asDiagonal();
    return 0.5 * (m + m.transpose());
}

// --- MetricSpec --------------------------------------------------------------

MetricSpec::MetricSpec(MetricDefinition def) : def_(std::move(def)) {
    if (def_.n < 1) throw ConfigError("metric: n must be >= 1");
    if (!(def_.x_min > 0.0) || !(def_.x0 > def_.x_min)) throw ConfigError("metric: need 0 < x_min < x0");
    if (def_.section == CrossSection::ZonalSphere) {
        if (def_.grid < 3) throw ConfigError("metric: zonal grid needs at least 3 cells");
        if (def_.components.size() != 2) throw ConfigError("metric: zonal sphere needs 2 components (dθ², angular)");
    } else {
        if (def_.n > 4) throw ConfigError("metric: torus cross-sections are limited to n <= 4");
        if (def_.grid < 4) throw ConfigError("metric: torus grid needs at least 4 cells per dimension");
        if (def_.components.size() != static_cast<std::size_t>(def_.n))
            throw ConfigError("metric: torus needs one component per dimension");
    }
    for (const auto& c : def_.components) {
        if (!c.h0) throw ConfigError("metric: every component needs h0");
        if (c.multiplicity < 0) throw ConfigError("metric: negative multiplicity");
    }
    build_grid();
    tabulate();
    validate();
}

void MetricSpec::build_grid() {
    auto pattern = std::make_shared<StencilPattern>();
    const int n_grid = def_.grid;
    if (section() == CrossSection::ZonalSphere) {
        spacing_ = std::numbers::pi / n_grid;
        const int sin_power = def_.n - 1;
        cells_.resize(static_cast<std::size_t>(n_grid));
        zonal_cell_.resize(n_grid);
        for (int i = 0; i < n_grid; ++i) {
            cells_[i] = Point{(i + 0.5) * spacing_, 0, 0, 0};
            zonal_cell_[i] = integrate_sin_power(i * spacing_, (i + 1) * spacing_, sin_power);
        }
        // Interior faces only; the pole faces carry zero flux.
        zonal_face_.resize(n_grid - 1);
        for (int f = 0; f + 1 < n_grid; ++f) {
            const double theta = (f + 1) * spacing_;
            faces_.push_back(Point{theta, 0, 0, 0});
            face_dir_.push_back(0);
            pattern->face_a.push_back(f);
            pattern->face_b.push_back(f + 1);
            zonal_face_[f] = std::pow(std::sin(theta), sin_power) / spacing_;
        }
    } else {
        const int d = def_.n;
        spacing_ = 2.0 * std::numbers::pi / n_grid;
        std::size_t total = 1;
        for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(n_grid);
        cells_.resize(total);
        const double cell_volume = std::pow(spacing_, d);
        zonal_cell_ = Field::Constant(static_cast<Eigen::Index>(total), cell_volume);
        std::vector<double> face_factor;
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::array<int, 4> multi{};
            std::size_t rem = idx;
            Point p{};
            for (int k = 0; k < d; ++k) {
                multi[k] = static_cast<int>(rem % n_grid);
                rem /= n_grid;
                p[k] = multi[k] * spacing_;
            }
            cells_[idx] = p;
            std::size_t stride = 1;
            for (int k = 0; k < d; ++k) {
                const long long shifted = (multi[k] + 1) % n_grid;
                const auto neighbour = static_cast<std::size_t>(static_cast<long long>(idx) +
                                                                (shifted - multi[k]) * static_cast<long long>(stride));
                Point fp = p;
                fp[k] += 0.5 * spacing_;
                faces_.push_back(fp);
                face_dir_.push_back(k);
                pattern->face_a.push_back(static_cast<int>(idx));
                pattern->face_b.push_back(static_cast<int>(neighbour));
                face_factor.push_back(cell_volume / (spacing_ * spacing_));
                stride *= static_cast<std::size_t>(n_grid);
            }
        }
        zonal_face_ = Eigen::Map<Field>(face_factor.data(), static_cast<Eigen::Index>(face_factor.size()));
    }

    // CSR rows from the face list.
    const std::size_t ncell = cells_.size();
    std::vector<std::vector<std::pair<int, int>>> rows(ncell);
    for (std::size_t f = 0; f < pattern->face_a.size(); ++f) {
        rows[pattern->face_a[f]].emplace_back(pattern->face_b[f], static_cast<int>(f));
        rows[pattern->face_b[f]].emplace_back(pattern->face_a[f], static_cast<int>(f));
    }
    pattern->row_ptr.assign(ncell + 1, 0);
    for (std::size_t i = 0; i < ncell; ++i) {
        pattern->row_ptr[i + 1] = pattern->row_ptr[i] + static_cast<int>(rows[i].size());
        for (auto [c, f] : rows[i]) {
            pattern->col.push_back(c);
            pattern->face_of.push_back(f);
        }
    }
    pattern_ = std::move(pattern);
}

void MetricSpec::tabulate() {
    const std::size_t npts = cells_.size() + faces_.size();
    auto sample_all = [&](const CoefficientFn& fn) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(npts));
        for (std::size_t i = 0; i < cells_.size(); ++i) v[static_cast<Eigen::Index>(i)] = fn(cells_[i]);
        for (std::size_t f = 0; f < faces_.size(); ++f) v[static_cast<Eigen::Index>(cells_.size() + f)] = fn(faces_[f]);
        return v;
    };
    for (const auto& c : def_.components) {
        Table t;
        t.multiplicity = c.multiplicity;
        t.coef.push_back(sample_all(c.h0));
        t.coef.push_back(c.linear ? sample_all(c.linear) : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(npts)));
        for (const auto& h1 : c.h1) t.coef.push_back(sample_all(h1));
        tables_.push_back(std::move(t));
    }
}

void MetricSpec::validate() const {
    for (std::size_t k = 0; k < tables_.size(); ++k) {
        const auto& h0 = tables_[k].coef[0];
        if (!h0.allFinite() || h0.minCoeff() <= 0.0) {
            throw ConfigError("metric '" + def_.name + "': h0 is not positive definite (component " + std::to_string(k) + ")");
        }
    }
    const int samples = std::max(def_.x_samples, 2);
    for (int s = 0; s <= samples; ++s) {
        const double x = def_.x_min + (def_.x0 - def_.x_min) * s / samples;
        for (std::size_t k = 0; k < tables_.size(); ++k) {
            const auto v = eval(tables_[k], x);
            if (!v.allFinite() || v.minCoeff() <= 0.0) {
                std::ostringstream os;
                os << "metric '" << def_.name << "': h(x) is not positive definite at x = " << x;
                throw ConfigError(os.str());
            }
        }
    }
}

Eigen::VectorXd MetricSpec::eval(const Table& t, double x) const {
    Eigen::VectorXd acc = t.coef.back();
    for (int p = static_cast<int>(t.coef.size()) - 2; p >= 0; --p) acc = acc * x + t.coef[p];
    return acc;
}

Eigen::VectorXd MetricSpec::eval_dx(const Table& t, double x) const {
    const int deg = static_cast<int>(t.coef.size()) - 1;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.coef[0].size());
    for (int p = deg; p >= 1; --p) acc = acc * x + p * t.coef[p];
    return acc;
}

Eigen::VectorXd MetricSpec::eval_dx_over_x(const Table& t, double x) const {
    const int deg = static_cast<int>(t.coef.size()) - 1;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(t.coef[0].size());
    for (int p = deg; p >= 2; --p) acc = acc * x + p * t.coef[p];
    if (!t.coef[1].isZero(0.0)) acc += t.coef[1] / x;  // blows up at x = 0 by construction
    return acc;
}

bool MetricSpec::has_linear_term() const {
    for (const auto& t : tables_) {
        if (!t.coef[1].isZero(0.0)) return true;
    }
    return false;
}

bool MetricSpec::x_independent() const {
    for (const auto& t : tables_) {
        for (std::size_t p = 1; p < t.coef.size(); ++p) {
            if (!t.coef[p].isZero(0.0)) return false;
        }
    }
    return true;
}

Field MetricSpec::component(int k, double x) const {
    return eval(tables_.at(static_cast<std::size_t>(k)), x).head(static_cast<Eigen::Index>(cells_.size()));
}

std::vector<Field> MetricSpec::all_entries(double x) const {
    std::vector<Field> out;
    for (const auto& t : tables_) out.push_back(eval(t, x));
    return out;
}

Stencil MetricSpec::stencil(double x) const {
    const auto ncell = static_cast<Eigen::Index>(cells_.size());
    const auto nface = static_cast<Eigen::Index>(faces_.size());
    const auto npts = ncell + nface;
    Eigen::VectorXd sqrt_det = Eigen::VectorXd::Ones(npts);
    std::vector<Eigen::VectorXd> values;
    values.reserve(tables_.size());
    for (const auto& t : tables_) {
        values.push_back(eval(t, x));
        if (t.multiplicity != 0) sqrt_det.array() *= values.back().array().pow(0.5 * t.multiplicity);
    }
    Stencil s;
    s.pattern = pattern_;
    s.weight = sqrt_det.head(ncell).cwiseProduct(zonal_cell_);
    s.conductance.resize(nface);
    for (Eigen::Index f = 0; f < nface; ++f) {
        const auto dir = static_cast<std::size_t>(face_dir_[static_cast<std::size_t>(f)]);
        s.conductance[f] = sqrt_det[ncell + f] / values[dir][ncell + f] * zonal_face_[f];
    }
    return s;
}

Field MetricSpec::density(double x) const {
    const double cell_measure = section() == CrossSection::ZonalSphere ? spacing_ : std::pow(spacing_, def_.n);
    return stencil(x).weight / cell_measure;
}

Field MetricSpec::log_density_derivative(double x) const {
    const auto ncell = static_cast<Eigen::Index>(cells_.size());
    Field acc = Field::Zero(ncell);
    for (const auto& t : tables_) {
        if (t.multiplicity == 0) continue;
        acc.array() += 0.5 * t.multiplicity * (eval_dx(t, x).head(ncell).array() / eval(t, x).head(ncell).array());
    }
    return acc;
}

Field MetricSpec::log_density_derivative_over_x(double x) const {
    const auto ncell = static_cast<Eigen::Index>(cells_.size());
    Field acc = Field::Zero(ncell);
    for (const auto& t : tables_) {
        if (t.multiplicity == 0) continue;
        acc.array() += 0.5 * t.multiplicity * (eval_dx_over_x(t, x).head(ncell).array() / eval(t, x).head(ncell).array());
    }
    return acc;
}

Field MetricSpec::sample(const std::function<double(const Point&)>& f) const {
    Field out(static_cast<Eigen::Index>(cells_.size()));
    for (std::size_t i = 0; i < cells_.size(); ++i) out[static_cast<Eigen::Index>(i)] = f(cells_[i]);
    return out;
}

// --- checks --------------------------------------------------------------------

ShortRangeVerdict check_short_range(const MetricSpec& spec, double tol) {
    if (!(tol > 0.0)) throw ConfigError("check_short_range: tol must be positive");
    if (spec.x_samples() < 2) throw ConfigError("check_short_range: x grid too coarse for a one-sided difference");
    const double delta = spec.x0() / spec.x_samples();
    const auto h_0 = spec.all_entries(0.0);
    const auto h_1 = spec.all_entries(delta);
    const auto h_2 = spec.all_entries(2.0 * delta);
    double worst = 0.0;
    for (std::size_t k = 0; k < h_0.size(); ++k) {
        const Field d = (-3.0 * h_0[k] + 4.0 * h_1[k] - h_2[k]) / (2.0 * delta);
        worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
    return ShortRangeVerdict{worst <= tol, worst};
}

Field volume_density(const MetricSpec& spec, double x) {
    if (!(x >= spec.x_min() && x <= spec.x0())) {
        std::ostringstream os;
        os << "volume_density: x = " << x << " outside [" << spec.x_min() << ", " << spec.x0() << "]";
        throw DomainError(os.str());
    }
    return spec.density(x);
}

double second_difference_bound(const MetricSpec& spec) {
    const int samples = std::max(spec.x_samples(), 4);
    const double delta = spec.x0() / samples;
    double worst = 0.0;
    auto prev = spec.all_entries(0.0);
    auto cur = spec.all_entries(delta);
    for (int s = 2; s <= samples; ++s) {
        auto next = spec.all_entries(s * delta);
        for (std::size_t k = 0; k < cur.size(); ++k) {
            worst = std::max(worst, ((next[k] - 2.0 * cur[k] + prev[k]) / (delta * delta)).cwiseAbs().maxCoeff());
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return worst;
}

// --- charts ------------------------------------------------------------------

MetricDefinition desitter_chart(int n, int grid, double x0, double x_min) {
    MetricDefinition def;
    def.name = "desitter";
    def.n = n;
    def.section = CrossSection::ZonalSphere;
    def.grid = grid;
    def.x0 = x0;
    def.x_min = x_min;
    // ¼(x²+1)² = ¼ + x²(½ + ¼x²)
    ComponentDef c{constant(0.25), {}, {constant(0.5), constant(0.0), constant(0.25)}, 1};
    def.components.push_back(c);
    c.multiplicity = n - 1;
    def.components.push_back(c);
    return def;
}

MetricDefinition product_chart(int n, int grid, CrossSection section, double x0, double x_min) {
    MetricDefinition def;
    def.name = "product";
    def.n = n;
    def.section = section;
    def.grid = grid;
    def.x0 = x0;
    def.x_min = x_min;
    if (section == CrossSection::ZonalSphere) {
        def.components.push_back(ComponentDef{constant(1.0), {}, {}, 1});
        def.components.push_back(ComponentDef{constant(1.0), {}, {}, n - 1});
    } else {
        for (int k = 0; k < n; ++k) def.components.push_back(ComponentDef{constant(1.0), {}, {}, 1});
    }
    return def;
}

MetricDefinition torus_perturbed_chart(int n, int grid, double amplitude, double x0, double x_min) {
    MetricDefinition def = product_chart(n, grid, CrossSection::Torus, x0, x_min);
    def.name = "torus-perturbed";
    for (auto& c : def.components) {
        c.h1 = {[amplitude, n](const Point& y) {
            double phase = 0.0;
            for (int k = 0; k < n; ++k) phase += y[k];
            return amplitude * (1.0 + 0.5 * std::cos(phase));
        }};
    }
    return def;
}

MetricDefinition with_linear_term(MetricDefinition def, double amplitude) {
    for (auto& c : def.components) {
        auto h0 = c.h0;
        c.linear = [h0, amplitude](const Point& y) { return amplitude * h0(y); };
    }
    def.name += "+linear";
    return def;
}

const char* section_name(CrossSection section) {
    return section == CrossSection::ZonalSphere ? "zonal" : "torus";
}

CrossSection parse_section(const std::string& name) {
    if (name == "zonal" || name == "sphere") return CrossSection::ZonalSphere;
    if (name == "torus") return CrossSection::Torus;
    throw ConfigError("unknown cross-section '" + name + "' (expected zonal or torus)");
}

MetricDefinition make_chart(const ChartParams& params) {
    if (params.n < 1 || params.n > 4) throw ConfigError("chart: n must lie in [1, 4]");
    if (params.grid < 4) throw ConfigError("chart: grid must be at least 4");
    if (!(params.x_min > 0.0) || !(params.x_min < params.x0)) throw ConfigError("chart: need 0 < x_min < x0");
    MetricDefinition def;
    if (params.name == "desitter") {
        if (params.section != CrossSection::ZonalSphere) throw ConfigError("chart desitter: zonal section only");
        def = desitter_chart(params.n, params.grid, params.x0, params.x_min);
    } else if (params.name == "product") {
        def = product_chart(params.n, params.grid, params.section, params.x0, params.x_min);
    } else if (params.name == "torus-perturbed") {
        if (params.section != CrossSection::Torus) throw ConfigError("chart torus-perturbed: torus section only");
        def = torus_perturbed_chart(params.n, params.grid, params.amplitude, params.x0, params.x_min);
    } else if (params.name == "custom") {
        def = product_chart(params.n, params.grid, params.section, params.x0, params.x_min);
        def.name = "custom";
        if (params.custom.size() != def.components.size()) {
            throw ConfigError("chart custom: expected " + std::to_string(def.components.size()) + " components");
        }
        for (std::size_t k = 0; k < params.custom.size(); ++k) {
            const auto& coef = params.custom[k];
            if (coef.empty()) throw ConfigError("chart custom: empty component");
            auto& c = def.components[k];
            c.h0 = constant(coef[0]);
            c.linear = coef.size() > 1 && coef[1] != 0.0 ? constant(coef[1]) : CoefficientFn{};
            c.h1.clear();
            for (std::size_t j = 2; j < coef.size(); ++j) c.h1.push_back(constant(coef[j]));
        }
    } else {
        throw ConfigError("unknown chart '" + params.name + "' (expected desitter, product, torus-perturbed, custom)");
    }
    if (params.linear_amplitude != 0.0) def = with_linear_term(std::move(def), params.linear_amplitude);
    return def;
}

}  // namespace cklab
