#include "galab/detail/stencil.hpp"

#include <cassert>

#include "galab/error.hpp"

namespace galab::detail {

std::vector<cplx> derivative(std::span<const cplx> f, double h) {
  const std::size_t n = f.size();
  if (n < static_cast<std::size_t>(kStencilWidth)) {
    throw StencilError("derivative stencil needs at least 5 samples, got " + std::to_string(n));
  }
  std::vector<cplx> d(n);
  const double s = 1.0 / (12.0 * h);
  d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
  d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  for (std::size_t k = 2; k + 2 < n; ++k) {
    d[k] = s * (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]);
  }
  d[n - 2] = -s * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
  d[n - 1] = -s * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
  return d;
}

cplx interval_integral(std::span<const cplx> g, double h, std::size_t k) {
  const std::size_t n = g.size();
  assert(k + 1 < n);
  if (n == 2) return 0.5 * h * (g[0] + g[1]);
  if (n == 3) {
    return k == 0 ? h / 12.0 * (5.0 * g[0] + 8.0 * g[1] - g[2])
                  : h / 12.0 * (-g[0] + 8.0 * g[1] + 5.0 * g[2]);
  }
  if (k == 0) return h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
  if (k == n - 2) return h / 24.0 * (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]);
  return h / 24.0 * (-g[k - 1] + 13.0 * g[k] + 13.0 * g[k + 1] - g[k + 2]);
}

std::vector<cplx> cumulative_integral(std::span<const cplx> g, double h, std::size_t anchor) {
  const std::size_t n = g.size();
  assert(anchor < n);
  std::vector<cplx> out(n, cplx{});
  if (n < 2) return out;
  for (std::size_t k = anchor; k + 1 < n; ++k) out[k + 1] = out[k] + interval_integral(g, h, k);
  for (std::size_t k = anchor; k > 0; --k) out[k - 1] = out[k] - interval_integral(g, h, k - 1);
  return out;
}

cplx definite_integral(std::span<const cplx> g, double h) {
  cplx sum{};
  for (std::size_t k = 0; k + 1 < g.size(); ++k) sum += interval_integral(g, h, k);
  return sum;
}

cplx lagrange_eval(std::span<const double> t, std::span<const cplx> f, double at) {
  cplx sum{};
  for (std::size_t j = 0; j < t.size(); ++j) {
    double w = 1.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k != j) w *= (at - t[k]) / (t[j] - t[k]);
    }
    sum += w * f[j];
  }
  return sum;
}

}  // namespace galab::detail
