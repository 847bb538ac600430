#include "galab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "galab/detail/stencil.hpp"
#include "galab/error.hpp"

namespace galab {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Segment {
  int begin;
  int end;
  int width() const { return end - begin; }
  bool contains(int i) const { return i >= begin && i < end; }
};

std::vector<Segment> segments(const GridSpec& g) {
  std::vector<Segment> out;
  int i = 0;
  while (i < g.nx) {
    while (i < g.nx && g.excluded(i)) ++i;
    const int begin = i;
    while (i < g.nx && !g.excluded(i)) ++i;
    if (i > begin) out.push_back({begin, i});
  }
  return out;
}

void require_imaginary(cplx c) {
  if (std::abs(c.real()) > 1e-12 * std::max(1.0, std::abs(c))) {
    throw InvalidArgument("integration constant must be purely imaginary");
  }
}

// Integrand of d omega = gx dx + gy dy for the product p = psi psi+.
struct Form {
  Field gx;
  Field gy;
};

Form form_of(const Field& psi, const Field& psi_plus) {
  require_same_grid(psi, psi_plus, "omega");
  const GridSpec& g = psi.grid();
  Form f{Field(g), Field(g)};
  for_each_active(g, [&](int i, int j) {
    const cplx p = psi(i, j) * psi_plus(i, j);
    f.gx(i, j) = 2.0 * kI * p.imag();
    f.gy(i, j) = 2.0 * kI * p.real();
  });
  return f;
}

void integrate_segment(const Form& form, Segment seg, NodeIndex base, cplx c, bool x_first, Field& out) {
  const GridSpec& g = out.grid();
  std::vector<cplx> line;
  auto row = [&](int j) {
    line.clear();
    for (int i = seg.begin; i < seg.end; ++i) line.push_back(form.gx(i, j));
    return detail::cumulative_integral(line, g.hx(), base.i - seg.begin);
  };
  auto column = [&](int i) {
    line.assign(g.ny, cplx{});
    for (int j = 0; j < g.ny; ++j) line[j] = form.gy(i, j);
    return detail::cumulative_integral(line, g.hy(), base.j);
  };
  if (x_first) {
    const auto along_x = row(base.j);
    for (int i = seg.begin; i < seg.end; ++i) {
      const auto along_y = column(i);
      for (int j = 0; j < g.ny; ++j) out(i, j) = c + along_x[i - seg.begin] + along_y[j];
    }
  } else {
    const auto along_y = column(base.i);
    for (int j = 0; j < g.ny; ++j) {
      const auto along_x = row(j);
      for (int i = seg.begin; i < seg.end; ++i) out(i, j) = c + along_y[j] + along_x[i - seg.begin];
    }
  }
}

// Value at x = target of the polynomial through the five columns of `seg`
// nearest to the excluded band, on row j.
cplx extrapolate_row(const Field& f, Segment seg, bool from_right_end, int j, double target) {
  const GridSpec& g = f.grid();
  const int n = std::min(detail::kStencilWidth, seg.width());
  std::vector<double> t;
  std::vector<cplx> v;
  for (int k = 0; k < n; ++k) {
    const int i = from_right_end ? seg.end - 1 - k : seg.begin + k;
    t.push_back(g.x(i));
    v.push_back(f(i, j));
  }
  return detail::lagrange_eval(t, v, target);
}

int inner_column(Segment seg, const GridSpec& g) {
  return std::abs(g.x(seg.begin)) <= std::abs(g.x(seg.end - 1)) ? seg.begin : seg.end - 1;
}

// Integrates the form along one L-path order on every active segment. The
// segment holding `base` uses `c`; the others are anchored at their innermost
// column on the basepoint row, continued from the primary segment.
Potential integrate(const Form& form, NodeIndex base, cplx c, bool x_first) {
  const GridSpec& g = form.gx.grid();
  if (base.i < 0 || base.i >= g.nx || base.j < 0 || base.j >= g.ny) {
    throw InvalidArgument("basepoint lies outside the grid");
  }
  if (g.excluded(base.i)) throw InvalidArgument("basepoint lies in the excluded band");
  const auto segs = segments(g);
  Field out(g);
  Segment primary{};
  for (const Segment& s : segs) {
    if (!s.contains(base.i)) continue;
    primary = s;
    integrate_segment(form, s, base, c, x_first, out);
  }
  std::optional<Potential::Anchor> secondary;
  for (const Segment& s : segs) {
    if (s.contains(base.i)) continue;
    const int i0 = inner_column(s, g);
    const bool primary_right_end = primary.end <= s.begin;
    const cplx c2{0.0, extrapolate_row(out, primary, primary_right_end, base.j, g.x(i0)).imag()};
    integrate_segment(form, s, {i0, base.j}, c2, x_first, out);
    if (!secondary) secondary = Potential::Anchor{{i0, base.j}, c2};
  }
  return Potential(std::move(out), {base, c}, secondary);
}

double real_drift(const Field& f) {
  double m = 0.0;
  for_each_active(f.grid(), [&](int i, int j) { m = std::max(m, std::abs(f(i, j).real())); });
  return m;
}

void project_imaginary(Field& f) {
  for_each_active(f.grid(), [&](int i, int j) { f(i, j) = {0.0, f(i, j).imag()}; });
}

Potential build(const Field& psi, const Field& psi_plus, NodeIndex base, cplx c) {
  require_imaginary(c);
  const Form form = form_of(psi, psi_plus);
  Potential xy = integrate(form, base, c, true);
  const Potential yx = integrate(form, base, c, false);
  xy.set_diagnostics(real_drift(xy.values()), max_abs_diff(xy.values(), yx.values()));
  return xy;
}

}  // namespace

cplx SingularFieldModel::value(int i, int j) const {
  const GridSpec& g = grid();
  const double y = g.y(j);
  return phase(y) * leading(y) / g.x(i) + smooth_remainder(i, j);
}

Field SingularFieldModel::to_field() const {
  Field out(grid());
  for_each_active(grid(), [&](int i, int j) { out(i, j) = value(i, j); });
  return out;
}

Potential::Potential(Field values, Anchor primary, std::optional<Anchor> secondary)
    : values_(std::move(values)), primary_(primary), secondary_(secondary) {}

Potential Potential::from_values(Field values, NodeIndex basepoint, double tol) {
  const double drift = real_drift(values);
  if (drift > tol) {
    throw ExactnessError("potential has real part " + std::to_string(drift) + " beyond tolerance");
  }
  project_imaginary(values);
  const cplx c = values(basepoint.i, basepoint.j);
  Potential p(std::move(values), {basepoint, c});
  p.set_diagnostics(drift, 0.0);
  return p;
}

Potential omega(const Field& psi, const Field& psi_plus, NodeIndex basepoint, cplx constant,
                const OmegaOptions& options) {
  Potential p = build(psi, psi_plus, basepoint, constant);
  const double scale = std::max(1.0, max_norm(p.values()));
  if (p.path_defect() > options.exactness_tol * scale) {
    throw ExactnessError("potential depends on the integration path (defect " +
                         std::to_string(p.path_defect()) +
                         "); the fields are not a conjugate solution pair");
  }
  if (p.max_real_drift() > options.real_drift_tol) {
    throw ExactnessError("potential drifted off the imaginary axis by " +
                         std::to_string(p.max_real_drift()));
  }
  return p;
}

Potential omega_unchecked(const Field& psi, const Field& psi_plus, NodeIndex basepoint, cplx constant) {
  return build(psi, psi_plus, basepoint, constant);
}

Potential omega_y_then_x(const Field& psi, const Field& psi_plus, NodeIndex basepoint, cplx constant) {
  require_imaginary(constant);
  return integrate(form_of(psi, psi_plus), basepoint, constant, false);
}

double loop_defect(const Field& psi, const Field& psi_plus, const NodeRect& r) {
  const GridSpec& g = psi.grid();
  if (r.i0 < 0 || r.j0 < 0 || r.i1 >= g.nx || r.j1 >= g.ny || r.i0 >= r.i1 || r.j0 >= r.j1) {
    throw InvalidArgument("loop rectangle must lie inside the grid with i0 < i1 and j0 < j1");
  }
  for (int i = r.i0; i <= r.i1; ++i) {
    if (g.excluded(i)) throw InvalidArgument("loop rectangle crosses the excluded band");
  }
  const Form form = form_of(psi, psi_plus);
  std::vector<cplx> line;
  auto along_row = [&](int j) {
    line.clear();
    for (int i = r.i0; i <= r.i1; ++i) line.push_back(form.gx(i, j));
    return detail::definite_integral(line, g.hx());
  };
  auto along_column = [&](int i) {
    line.clear();
    for (int j = r.j0; j <= r.j1; ++j) line.push_back(form.gy(i, j));
    return detail::definite_integral(line, g.hy());
  };
  return std::abs(along_row(r.j0) + along_column(r.i1) - along_row(r.j1) - along_column(r.i0));
}

Potential omega_singular(const SingularFieldModel& f, const SingularFieldModel& f_plus, cplx constant) {
  require_imaginary(constant);
  require_same_grid(f.smooth_remainder, f_plus.smooth_remainder, "omega_singular");
  const GridSpec& g = f.grid();
  for (int i = 0; i < g.nx; ++i) {
    if (!g.excluded(i) && std::abs(g.x(i)) < 1e-14) {
      throw InvalidArgument("singular potential needs the pole column x = 0 inside the excluded band");
    }
  }

  const FunctionOnInterval b_fn = f.leading * f_plus.leading;
  const FunctionOnInterval b_prime = b_fn.derivative();
  std::vector<double> b(g.ny);
  std::vector<double> db(g.ny);
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    const cplx bj = b_fn(y);
    if (!(bj.real() > 0.0) || std::abs(bj.imag()) > 1e-10 * std::max(1.0, std::abs(bj))) {
      throw PositivityError("product of leading coefficients is not positive at y = " + std::to_string(y));
    }
    const cplx pp = f.phase(y) * f_plus.phase(y);
    if (std::abs(pp + kI) > 1e-10) {
      throw InvalidArgument("leading phases must multiply to -i at y = " + std::to_string(y));
    }
    b[j] = bj.real();
    db[j] = b_prime(y).real();
  }

  // Remainder form after removing d(2i B / x).
  Form form{Field(g), Field(g)};
  for_each_active(g, [&](int i, int j) {
    const double x = g.x(i);
    const double y = g.y(j);
    const cplx lead = f.phase(y) * f.leading(y);
    const cplx lead_plus = f_plus.phase(y) * f_plus.leading(y);
    const cplx r = f.smooth_remainder(i, j);
    const cplx r_plus = f_plus.smooth_remainder(i, j);
    const cplx q1 = lead * r_plus + lead_plus * r;
    const cplx q0 = r * r_plus;
    form.gx(i, j) = 2.0 * kI * (q1.imag() / x + q0.imag());
    form.gy(i, j) = 2.0 * kI * ((q1.real() - db[j]) / x + q0.real());
  });

  const int jm = g.ny / 2;
  Field rem(g);
  Field rem_yx(g);
  std::optional<Potential::Anchor> primary;
  std::optional<Potential::Anchor> secondary;
  for (const Segment& s : segments(g)) {
    if (s.width() < detail::kStencilWidth) {
      throw StencilError("half-strip narrower than the quadrature stencil");
    }
    const int i0 = inner_column(s, g);
    integrate_segment(form, s, {i0, jm}, cplx{}, true, rem);
    integrate_segment(form, s, {i0, jm}, cplx{}, false, rem_yx);
    const bool toward_right_end = i0 == s.end - 1;
    const cplx at_zero = extrapolate_row(rem, s, toward_right_end, jm, 0.0);
    const cplx shift{0.0, (constant - at_zero).imag()};
    for (int j = 0; j < g.ny; ++j) {
      for (int i = s.begin; i < s.end; ++i) {
        rem(i, j) += shift;
        rem_yx(i, j) += shift;
      }
    }
    const Potential::Anchor anchor{{i0, jm}, rem(i0, jm)};
    if (g.x(i0) > 0.0 && !primary) primary = anchor;
    else if (!secondary) secondary = anchor;
  }
  if (!primary) {
    primary = secondary;
    secondary.reset();
  }
  if (!primary) throw InvalidArgument("singular potential grid has no active columns");

  const double defect = max_abs_diff(rem, rem_yx);
  Field values(g);
  for_each_active(g, [&](int i, int j) { values(i, j) = 2.0 * kI * b[j] / g.x(i) + rem(i, j); });
  primary->constant = values(primary->node.i, primary->node.j);
  if (secondary) secondary->constant = values(secondary->node.i, secondary->node.j);
  Potential p(std::move(values), *primary, secondary);
  p.set_diagnostics(real_drift(rem), defect);
  return p;
}

}  // namespace galab
