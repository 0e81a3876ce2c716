#include "cklab/sampling.hpp"

#include "cklab/errors.hpp"
#include "cklab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cklab {

std::mt19937_64 run_rng(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6b6c6162u};
    return std::mt19937_64(seq);
}

int default_modes(const MetricSpec& metric) { return std::max(1, static_cast<int>(metric.size()) / 3); }

namespace {

Eigen::MatrixXd zonal_modes(const MetricSpec& metric, int modes) {
    const Eigenbasis b = eigenbasis(metric, metric.x0());
    Eigen::MatrixXd out = b.modes.leftCols(modes);
    for (int j = 0; j < modes; ++j) {
        if (out(0, j) < 0.0) out.col(j) *= -1.0;
    }
    return out;
}

Eigen::MatrixXd fourier_modes(const MetricSpec& metric, int modes) {
    const int d = metric.dims();
    const int kmax = metric.grid() / 2 - 1;
    std::vector<std::array<int, 4>> wavevectors;
    std::array<int, 4> k{};
    // enumerate the half-space of Z^d: first nonzero component positive
    const int span = 2 * kmax + 1;
    long total = 1;
    for (int i = 0; i < d; ++i) total *= span;
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int i = 0; i < d; ++i) {
            k[i] = static_cast<int>(rem % span) - kmax;
            rem /= span;
        }
        int first = 0;
        for (int i = 0; i < d; ++i) {
            if (k[i] != 0) {
                first = k[i];
                break;
            }
        }
        if (first >= 0) wavevectors.push_back(k);
    }
    auto norm2 = [d](const std::array<int, 4>& a) {
        int s = 0;
        for (int i = 0; i < d; ++i) s += a[i] * a[i];
        return s;
    };
    std::stable_sort(wavevectors.begin(), wavevectors.end(), [&](const auto& a, const auto& b) {
        if (norm2(a) != norm2(b)) return norm2(a) < norm2(b);
        return std::lexicographical_compare(b.begin(), b.begin() + d, a.begin(), a.begin() + d);
    });
    Eigen::MatrixXd out(static_cast<Eigen::Index>(metric.size()), modes);
    int col = 0;
    for (const auto& kv : wavevectors) {
        if (col >= modes) break;
        auto phase = [&kv, d](const Point& y) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += kv[i] * y[i];
            return s;
        };
        if (norm2(kv) == 0) {
            out.col(col++) = metric.sample([](const Point&) { return 1.0; });
            continue;
        }
        out.col(col++) = metric.sample([&](const Point& y) { return std::cos(phase(y)); });
        if (col < modes) out.col(col++) = metric.sample([&](const Point& y) { return std::sin(phase(y)); });
    }
    if (col < modes) throw ConfigError("BandBasis: grid too coarse for the requested number of modes");
    return out;
}

}  // namespace

BandBasis::BandBasis(const MetricSpec& metric, int modes) {
    if (modes < 1 || modes > static_cast<int>(metric.size())) throw ConfigError("BandBasis: modes out of range");
    basis_ = metric.section() == CrossSection::ZonalSphere ? zonal_modes(metric, modes) : fourier_modes(metric, modes);
}

PhysicalData sample_data(const MetricSpec& metric, const BandBasis& basis, std::mt19937_64& rng, double norm) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field a(basis.modes());
    Field b(basis.modes());
    for (int j = 0; j < basis.modes(); ++j) a[j] = gauss(rng);
    for (int j = 0; j < basis.modes(); ++j) b[j] = gauss(rng);
    PhysicalData data{metric.x0(), basis.combine(a), basis.combine(b)};
    const double current = data_norm(data, metric).sum();
    if (current > 0.0) {
        data.u0 *= norm / current;
        data.u1 *= norm / current;
    }
    return data;
}

RandomForcing::RandomForcing(const MetricSpec& metric, const BandBasis& basis, std::mt19937_64& rng, int time_modes)
    : spatial_(basis.matrix()), x0_(metric.x0()), n_(metric.n()) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    coef_.resize(basis.modes(), time_modes);
    for (int l = 0; l < time_modes; ++l) {
        for (int j = 0; j < basis.modes(); ++j) coef_(j, l) = gauss(rng);
    }
    coef_ /= coef_.norm();
}

Field RandomForcing::reduced(double x) const {
    Field time(coef_.cols());
    for (Eigen::Index l = 0; l < coef_.cols(); ++l) time[l] = std::cos(static_cast<double>(l) * std::numbers::pi * x / x0_);
    return spatial_ * (coef_ * time);
}

Field RandomForcing::physical(double x) const { return std::pow(x, conformal_power(n_) + 2.0) * reduced(x); }

RandomForcing& RandomForcing::operator*=(double c) {
    coef_ *= c;
    return *this;
}

FieldJet smooth_jet(const MetricSpec& metric, std::uint64_t seed, double x) {
    auto rng = run_rng(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const int d = metric.dims();
    std::array<Field, 3> parts;
    for (auto& part : parts) {
        part = Field::Zero(static_cast<Eigen::Index>(metric.size()));
        for (int j = 0; j < 5; ++j) {
            const double c = gauss(rng);
            if (metric.section() == CrossSection::ZonalSphere) {
                part += c * metric.sample([j](const Point& y) { return std::cos(j * y[0]); });
            } else {
                std::array<int, 4> k{};
                for (int i = 0; i < d; ++i) k[i] = static_cast<int>(rng() % 5) - 2;
                const double phi = angle(rng);
                part += c * metric.sample([&k, d, phi](const Point& y) {
                    double s = phi;
                    for (int i = 0; i < d; ++i) s += k[i] * y[i];
                    return std::cos(s);
                });
            }
        }
    }
    return FieldJet{parts[0] + x * parts[1] + x * x * parts[2], parts[1] + 2.0 * x * parts[2], 2.0 * parts[2]};
}

}  // namespace cklab
