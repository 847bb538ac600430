#include "galab/field.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "galab/detail/stencil.hpp"
#include "galab/error.hpp"

namespace galab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Maximal runs [begin, end) of non-excluded columns.
std::vector<std::pair<int, int>> active_segments(const GridSpec& g) {
  std::vector<std::pair<int, int>> segs;
  int i = 0;
  while (i < g.nx) {
    while (i < g.nx && g.excluded(i)) ++i;
    const int begin = i;
    while (i < g.nx && !g.excluded(i)) ++i;
    if (i > begin) segs.emplace_back(begin, i);
  }
  return segs;
}

}  // namespace

void GridSpec::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw InvalidArgument("grid rectangle must satisfy x_min < x_max and y_min < y_max");
  }
  if (nx < 4 || ny < 4) throw InvalidArgument("grid needs nx >= 4 and ny >= 4");
  if (excluded_band) {
    const double reach = std::max(std::abs(x_min), x_max);
    if (!(*excluded_band > 0.0) || !(*excluded_band < reach)) {
      throw InvalidArgument("excluded band must be positive and smaller than max(|x_min|, x_max)");
    }
  }
}

GridSpec GridSpec::with_resolution(int new_nx, int new_ny) const {
  GridSpec g = *this;
  g.nx = new_nx;
  g.ny = new_ny;
  return g;
}

Field::Field(GridSpec grid, FieldRole role) : grid_(grid), role_(role) {
  grid_.validate();
  values_.assign(grid_.size(), cplx{});
  for (int i = 0; i < grid_.nx; ++i) {
    if (!grid_.excluded(i)) continue;
    for (int j = 0; j < grid_.ny; ++j) values_[grid_.index(i, j)] = {kNaN, kNaN};
  }
}

Field::Field(GridSpec grid, std::vector<cplx> values, FieldRole role)
    : grid_(grid), values_(std::move(values)), role_(role) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    throw ShapeError("field has " + std::to_string(values_.size()) + " values, grid has " +
                     std::to_string(grid_.size()) + " nodes");
  }
}

Field Field::sample(const GridSpec& grid, const std::function<cplx(double, double)>& fn,
                    FieldRole role) {
  Field f(grid, role);
  for_each_active(grid, [&](int i, int j) { f(i, j) = fn(grid.x(i), grid.y(j)); });
  return f;
}

Field Field::map(const std::function<cplx(cplx)>& op) const {
  Field out(grid_, role_);
  for_each_active(grid_, [&](int i, int j) { out(i, j) = op((*this)(i, j)); });
  return out;
}

template <class Op>
Field& Field::combine(const Field& rhs, Op op, const char* what) {
  require_same_grid(*this, rhs, what);
  for_each_active(grid_, [&](int i, int j) {
    const std::size_t k = grid_.index(i, j);
    values_[k] = op(values_[k], rhs.values_[k]);
  });
  return *this;
}

Field& Field::operator+=(const Field& rhs) {
  return combine(rhs, [](cplx a, cplx b) { return a + b; }, "field addition");
}
Field& Field::operator-=(const Field& rhs) {
  return combine(rhs, [](cplx a, cplx b) { return a - b; }, "field subtraction");
}
Field& Field::operator*=(const Field& rhs) {
  return combine(rhs, [](cplx a, cplx b) { return a * b; }, "field product");
}
Field& Field::operator/=(const Field& rhs) {
  return combine(rhs, [](cplx a, cplx b) { return a / b; }, "field quotient");
}
Field& Field::operator*=(cplx s) {
  for_each_active(grid_, [&](int i, int j) { values_[grid_.index(i, j)] *= s; });
  return *this;
}
Field& Field::operator+=(cplx s) {
  for_each_active(grid_, [&](int i, int j) { values_[grid_.index(i, j)] += s; });
  return *this;
}

void Field::check_finite(const char* what) const {
  for_each_active(grid_, [&](int i, int j) {
    const cplx v = (*this)(i, j);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument(std::string(what) + ": non-finite value at node (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
    }
  });
}

Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
Field operator*(Field lhs, const Field& rhs) { return lhs *= rhs; }
Field operator/(Field lhs, const Field& rhs) { return lhs /= rhs; }
Field operator*(Field f, cplx s) { return f *= s; }
Field operator*(cplx s, Field f) { return f *= s; }
Field operator+(Field f, cplx s) { return f += s; }
Field operator-(Field f) { return f *= -1.0; }
Field conj(const Field& f) { return f.map([](cplx v) { return std::conj(v); }); }

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!(a.grid() == b.grid())) throw ShapeError(std::string(what) + ": fields live on different grids");
}

void for_each_active(const GridSpec& grid, const std::function<void(int, int)>& fn) {
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.excluded(i)) fn(i, j);
    }
  }
}

double max_norm(const Field& f) {
  double m = 0.0;
  for_each_active(f.grid(), [&](int i, int j) { m = std::max(m, std::abs(f(i, j))); });
  return m;
}

double max_abs_diff(const Field& a, const Field& b) {
  require_same_grid(a, b, "max_abs_diff");
  double m = 0.0;
  for_each_active(a.grid(), [&](int i, int j) { m = std::max(m, std::abs(a(i, j) - b(i, j))); });
  return m;
}

double max_rel_diff(const Field& a, const Field& b) {
  return max_abs_diff(a, b) / std::max(1.0, max_norm(b));
}

Field dx(const Field& f) {
  const GridSpec& g = f.grid();
  if (g.nx < detail::kStencilWidth || g.ny < detail::kStencilWidth) {
    throw StencilError("grid needs at least 5 nodes per axis for the derivative stencil");
  }
  Field out(g, FieldRole::generic);
  std::vector<cplx> line;
  for (auto [begin, end] : active_segments(g)) {
    if (end - begin < detail::kStencilWidth) {
      throw StencilError("active segment of " + std::to_string(end - begin) +
                         " columns is narrower than the derivative stencil");
    }
    for (int j = 0; j < g.ny; ++j) {
      line.clear();
      for (int i = begin; i < end; ++i) line.push_back(f(i, j));
      const auto d = detail::derivative(line, g.hx());
      for (int i = begin; i < end; ++i) out(i, j) = d[i - begin];
    }
  }
  return out;
}

Field dy(const Field& f) {
  const GridSpec& g = f.grid();
  if (g.nx < detail::kStencilWidth || g.ny < detail::kStencilWidth) {
    throw StencilError("grid needs at least 5 nodes per axis for the derivative stencil");
  }
  Field out(g, FieldRole::generic);
  std::vector<cplx> line(g.ny);
  for (int i = 0; i < g.nx; ++i) {
    if (g.excluded(i)) continue;
    for (int j = 0; j < g.ny; ++j) line[j] = f(i, j);
    const auto d = detail::derivative(line, g.hy());
    for (int j = 0; j < g.ny; ++j) out(i, j) = d[j];
  }
  return out;
}

Field dbar(const Field& f) {
  Field fx = dx(f);
  const Field fy = dy(f);
  for_each_active(f.grid(), [&](int i, int j) { fx(i, j) = 0.5 * (fx(i, j) + cplx(0, 1) * fy(i, j)); });
  return fx;
}

Field dz(const Field& f) {
  Field fx = dx(f);
  const Field fy = dy(f);
  for_each_active(f.grid(), [&](int i, int j) { fx(i, j) = 0.5 * (fx(i, j) - cplx(0, 1) * fy(i, j)); });
  return fx;
}

Field residual_field(const Field& u, const Field& psi, EquationKind kind) {
  require_same_grid(u, psi, "residual");
  Field r = dbar(psi);
  for_each_active(u.grid(), [&](int i, int j) {
    const cplx coeff = kind == EquationKind::direct ? u(i, j) : -std::conj(u(i, j));
    r(i, j) -= coeff * std::conj(psi(i, j));
  });
  return r;
}

double residual(const Field& u, const Field& psi, EquationKind kind) {
  return max_norm(residual_field(u, psi, kind));
}

cplx interpolate(const Field& f, cplx at) {
  const GridSpec& g = f.grid();
  const double tol = 1e-12;
  const double sx = (at.real() - g.x_min) / g.hx();
  const double sy = (at.imag() - g.y_min) / g.hy();
  if (sx < -tol || sy < -tol || sx > g.nx - 1 + tol || sy > g.ny - 1 + tol) {
    throw InvalidArgument("interpolation point (" + fmt17(at.real()) + ", " + fmt17(at.imag()) +
                          ") lies outside the grid");
  }
  // Snap to a node when the point coincides with one so that identity
  // resampling reproduces the data bit for bit.
  const double rx = std::round(sx);
  const double ry = std::round(sy);
  const bool on_x = std::abs(sx - rx) < tol;
  const bool on_y = std::abs(sy - ry) < tol;

  auto stencil_start = [](double s, int n) {
    int k = static_cast<int>(std::floor(s)) - 1;
    return std::clamp(k, 0, n - 4);
  };
  std::vector<int> xs;
  std::vector<int> ys;
  if (on_x) xs = {static_cast<int>(rx)};
  else {
    const int k = stencil_start(sx, g.nx);
    xs = {k, k + 1, k + 2, k + 3};
  }
  if (on_y) ys = {static_cast<int>(ry)};
  else {
    const int k = stencil_start(sy, g.ny);
    ys = {k, k + 1, k + 2, k + 3};
  }
  for (int i : xs) {
    if (g.excluded(i)) throw InvalidArgument("interpolation stencil touches an excluded column");
  }
  std::vector<double> tx;
  for (int i : xs) tx.push_back(g.x(i));
  std::vector<double> ty;
  for (int j : ys) ty.push_back(g.y(j));
  std::vector<cplx> col(xs.size());
  std::vector<cplx> rows(ys.size());
  for (std::size_t b = 0; b < ys.size(); ++b) {
    for (std::size_t a = 0; a < xs.size(); ++a) col[a] = f(xs[a], ys[b]);
    rows[b] = xs.size() == 1 ? col[0] : detail::lagrange_eval(tx, col, at.real());
  }
  return ys.size() == 1 ? rows[0] : detail::lagrange_eval(ty, rows, at.imag());
}

void write_csv(std::ostream& out, const Field& f) {
  const GridSpec& g = f.grid();
  out << "x,y,re,im\n";
  for_each_active(g, [&](int i, int j) {
    const cplx v = f(i, j);
    out << fmt17(g.x(i)) << ',' << fmt17(g.y(j)) << ',' << fmt17(v.real()) << ',' << fmt17(v.imag())
        << '\n';
  });
}

}  // namespace galab
