#include "cklab/kernels.hpp"

#include <cmath>
#include <vector>

namespace cklab::kernels {

namespace {

inline double power_term(double w, double u, double q) {
    const double a = std::abs(u);
    if (q == 2.0) return w * a * a;
    return a == 0.0 ? 0.0 : w * std::pow(a, q);
}

}  // namespace

void laplacian_apply_serial(const StencilPattern& pattern, std::span<const double> weight,
                            std::span<const double> conductance, std::span<const double> u, std::span<double> out) {
    const std::size_t n = weight.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int e = pattern.row_ptr[i]; e < pattern.row_ptr[i + 1]; ++e) {
            acc += conductance[pattern.face_of[e]] * (u[i] - u[pattern.col[e]]);
        }
        out[i] = acc / weight[i];
    }
}

void laplacian_apply_omp(const StencilPattern& pattern, std::span<const double> weight,
                         std::span<const double> conductance, std::span<const double> u, std::span<double> out) {
    const long n = static_cast<long>(weight.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int e = pattern.row_ptr[i]; e < pattern.row_ptr[i + 1]; ++e) {
            acc += conductance[pattern.face_of[e]] * (u[i] - u[pattern.col[e]]);
        }
        out[i] = acc / weight[i];
    }
}

double dirichlet_serial(const StencilPattern& pattern, std::span<const double> conductance, std::span<const double> u) {
    double acc = 0.0;
    for (std::size_t f = 0; f < pattern.face_a.size(); ++f) {
        const double d = u[pattern.face_a[f]] - u[pattern.face_b[f]];
        acc += conductance[f] * d * d;
    }
    return acc;
}

double dirichlet_omp(const StencilPattern& pattern, std::span<const double> conductance, std::span<const double> u) {
    const std::size_t faces = pattern.face_a.size();
    const long chunks = static_cast<long>((faces + kChunk - 1) / kChunk);
    std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < chunks; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        const std::size_t hi = std::min(faces, lo + kChunk);
        double acc = 0.0;
        for (std::size_t f = lo; f < hi; ++f) {
            const double d = u[pattern.face_a[f]] - u[pattern.face_b[f]];
            acc += conductance[f] * d * d;
        }
        partial[static_cast<std::size_t>(c)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double weighted_power_sum_serial(std::span<const double> weight, std::span<const double> u, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) acc += power_term(weight[i], u[i], q);
    return acc;
}

double weighted_power_sum_omp(std::span<const double> weight, std::span<const double> u, double q) {
    const std::size_t n = weight.size();
    const long chunks = static_cast<long>((n + kChunk - 1) / kChunk);
    std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < chunks; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += power_term(weight[i], u[i], q);
        partial[static_cast<std::size_t>(c)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

void laplacian_apply(const StencilPattern& pattern, std::span<const double> weight, std::span<const double> conductance,
                     std::span<const double> u, std::span<double> out) {
    if (weight.size() >= kParallelThreshold) {
        laplacian_apply_omp(pattern, weight, conductance, u, out);
    } else {
        laplacian_apply_serial(pattern, weight, conductance, u, out);
    }
}

double dirichlet(const StencilPattern& pattern, std::span<const double> conductance, std::span<const double> u) {
    if (u.size() >= kParallelThreshold) return dirichlet_omp(pattern, conductance, u);
    return dirichlet_serial(pattern, conductance, u);
}

double weighted_power_sum(std::span<const double> weight, std::span<const double> u, double q) {
    if (weight.size() >= kParallelThreshold) return weighted_power_sum_omp(weight, u, q);
    return weighted_power_sum_serial(weight, u, q);
}

}  // namespace cklab::kernels
