#pragma once

// One-dimensional fourth-order finite-difference and quadrature kernels on
// uniformly spaced samples. Shared by grid fields and interval functions.

#include <complex>
#include <span>
#include <vector>

namespace galab::detail {

using cplx = std::complex<double>;

/// Minimum number of samples the derivative stencils need.
inline constexpr int kStencilWidth = 5;

/// First derivative, central fourth-order in the interior and one-sided
/// fourth-order at the two nodes nearest each end. Requires f.size() >= 5.
std::vector<cplx> derivative(std::span<const cplx> f, double h);

/// Integral of the interpolating cubic over [t_k, t_{k+1}].
/// Requires g.size() >= 2; falls back to lower order rules for 2 or 3 samples.
cplx interval_integral(std::span<const cplx> g, double h, std::size_t k);

/// Running integral I[k] = int_{t_anchor}^{t_k} g, built interval by interval
/// so that the error is a smooth function of position.
std::vector<cplx> cumulative_integral(std::span<const cplx> g, double h, std::size_t anchor);

/// Integral over the whole sample range.
cplx definite_integral(std::span<const cplx> g, double h);

/// Value at t of the Lagrange polynomial through (t[k], f[k]).
cplx lagrange_eval(std::span<const double> t, std::span<const cplx> f, double at);

}  // namespace galab::detail
