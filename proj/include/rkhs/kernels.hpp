#pragma once

#include <cstddef>
#include <span>

#include "rkhs/kernel.hpp"

namespace rkhs {

/// min(s, t) on (0, inf): the covariance of standard Brownian motion.
Kernel brownian_kernel();

/// min(s, t) - s t on (0, 1): the Brownian bridge covariance.
Kernel bridge_kernel();

// Closed forms for Brownian motion restricted to x_1 < x_2 < ... (all > 0).
// Indices are 0-based.

/// ||delta_{x_i}||^2 from the neighbor gaps. The first point uses the origin
/// as its left neighbor. Throws BoundaryIndex for the last point, which has
/// no right neighbor in a finite set.
double bm_delta_norm_sq(std::span<const double> points, std::size_t index);

/// log det of the Brownian Gram matrix: log x_1 + sum log(x_{i+1} - x_i).
double bm_log_det(std::span<const double> points);
double bm_det(std::span<const double> points);

// Brownian bridge on 0 < x_1 < ... < x_n < 1, with the pinned endpoints 0
// and 1 acting as virtual neighbors.

double bridge_log_det(std::span<const double> points);
double bridge_det(std::span<const double> points);
double bridge_delta_norm_sq(std::span<const double> points, std::size_t index);

}  // namespace rkhs
