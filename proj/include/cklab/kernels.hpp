#pragma once

#include "cklab/geometry.hpp"

#include <span>

namespace cklab::kernels {

// Serial reference kernels and their OpenMP counterparts. The parallel
// reductions sum fixed-size chunks and then combine the partials in order,
// so their result does not depend on the thread count.

inline constexpr std::size_t kChunk = 1024;
/// Below this many cells the dispatching entry points stay serial.
inline constexpr std::size_t kParallelThreshold = 8192;

void laplacian_apply_serial(const StencilPattern& pattern, std::span<const double> weight,
                            std::span<const double> conductance, std::span<const double> u, std::span<double> out);
void laplacian_apply_omp(const StencilPattern& pattern, std::span<const double> weight,
                         std::span<const double> conductance, std::span<const double> u, std::span<double> out);

double dirichlet_serial(const StencilPattern& pattern, std::span<const double> conductance, std::span<const double> u);
double dirichlet_omp(const StencilPattern& pattern, std::span<const double> conductance, std::span<const double> u);

/// sum_i w_i |u_i|^q
double weighted_power_sum_serial(std::span<const double> weight, std::span<const double> u, double q);
double weighted_power_sum_omp(std::span<const double> weight, std::span<const double> u, double q);

// Dispatch on problem size.
void laplacian_apply(const StencilPattern& pattern, std::span<const double> weight, std::span<const double> conductance,
                     std::span<const double> u, std::span<double> out);
double dirichlet(const StencilPattern& pattern, std::span<const double> conductance, std::span<const double> u);
double weighted_power_sum(std::span<const double> weight, std::span<const double> u, double q);

}  // namespace cklab::kernels
