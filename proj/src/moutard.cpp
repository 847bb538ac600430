#include "galab/moutard.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "galab/error.hpp"

namespace galab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kDetRel = 1e-8;

std::string node_str(const GridSpec& g, int i, int j) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "node (%d, %d) at z = %.6g%+.6gi", i, j, g.x(i), g.y(j));
  return buf;
}

// Per-node N x N potential matrices with linear solves against them.
class NodeSystem {
 public:
  NodeSystem(const GridSpec& grid, int n) : grid_(grid), n_(n), a_(grid.size() * n * n) {}

  cplx& at(int i, int j, int r, int c) { return a_[(grid_.index(i, j) * n_ + r) * n_ + c]; }
  cplx at(int i, int j, int r, int c) const { return a_[(grid_.index(i, j) * n_ + r) * n_ + c]; }

  Eigen::MatrixXcd matrix(int i, int j) const {
    Eigen::MatrixXcd m(n_, n_);
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) m(r, c) = at(i, j, r, c);
    }
    return m;
  }

  cplx det(int i, int j) const {
    if (n_ == 1) return at(i, j, 0, 0);
    if (n_ == 2) return at(i, j, 0, 0) * at(i, j, 1, 1) - at(i, j, 0, 1) * at(i, j, 1, 0);
    return matrix(i, j).partialPivLu().determinant();
  }

  // Solves A x = rhs, or A^T x = rhs when `transpose`.
  void solve(int i, int j, std::span<const cplx> rhs, std::span<cplx> x, bool transpose) const {
    auto m = [&](int r, int c) { return transpose ? at(i, j, c, r) : at(i, j, r, c); };
    if (n_ == 1) {
      x[0] = rhs[0] / m(0, 0);
      return;
    }
    if (n_ == 2) {
      const cplx d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      x[0] = (m(1, 1) * rhs[0] - m(0, 1) * rhs[1]) / d;
      x[1] = (m(0, 0) * rhs[1] - m(1, 0) * rhs[0]) / d;
      return;
    }
    Eigen::MatrixXcd a = matrix(i, j);
    if (transpose) a.transposeInPlace();
    Eigen::VectorXcd b(n_);
    for (int k = 0; k < n_; ++k) b(k) = rhs[k];
    const Eigen::VectorXcd sol = a.partialPivLu().solve(b);
    for (int k = 0; k < n_; ++k) x[k] = sol(k);
  }

  int n() const { return n_; }
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  int n_;
  std::vector<cplx> a_;
};

struct Checked {
  double det_min;
  double det_tol;
};

template <class Err>
Checked check_system(const NodeSystem& sys, const char* what) {
  const GridSpec& g = sys.grid();
  double scale = 0.0;
  for_each_active(g, [&](int i, int j) {
    for (int r = 0; r < sys.n(); ++r) {
      for (int c = 0; c < sys.n(); ++c) scale = std::max(scale, std::abs(sys.at(i, j, r, c)));
    }
  });
  const double tol = kDetRel * std::pow(scale, sys.n());
  double det_min = std::numeric_limits<double>::infinity();
  int bad = 0;
  NodeIndex first{};
  for_each_active(g, [&](int i, int j) {
    const double d = std::abs(sys.det(i, j));
    det_min = std::min(det_min, d);
    if (d <= tol && bad++ == 0) first = {i, j};
  });
  if (bad > 0) {
    throw Err(std::string(what) + " vanishes at " + std::to_string(bad) + " node(s), first at " +
              node_str(g, first.i, first.j));
  }
  return {det_min, tol};
}

void require_potentials(std::span<const Potential> ws, int n, const GridSpec& g) {
  if (static_cast<int>(ws.size()) != n) {
    throw InvalidArgument("transform map needs " + std::to_string(n) + " potentials, got " +
                          std::to_string(ws.size()));
  }
  for (const Potential& w : ws) {
    if (!(w.grid() == g)) throw ShapeError("potential lives on a different grid than the seeds");
  }
}

// Builds u~ and both maps from per-node systems; shared by every transform.
TransformResult assemble(const Field& u, std::vector<SeedPair> seeds, std::shared_ptr<const NodeSystem> sys,
                         Checked checked, NodeIndex basepoint) {
  const GridSpec& g = u.grid();
  const int n = sys->n();
  TransformResult out;
  out.N = n;
  out.det_omega_min = checked.det_min;
  out.det_tol = checked.det_tol;
  out.basepoint = basepoint;

  auto f = std::make_shared<const std::vector<SeedPair>>(seeds);
  out.seeds = std::move(seeds);

  out.u_tilde = Field(g, FieldRole::coefficient);
  std::vector<cplx> rhs(n);
  std::vector<cplx> x(n);
  for_each_active(g, [&](int i, int j) {
    for (int k = 0; k < n; ++k) rhs[k] = std::conj((*f)[k].f_plus(i, j));
    sys->solve(i, j, rhs, x, false);
    cplx acc = u(i, j);
    for (int k = 0; k < n; ++k) acc += (*f)[k].f(i, j) * x[k];
    out.u_tilde(i, j) = acc;
  });

  out.map_psi = [f, sys, n, g](const Field& psi, std::span<const Potential> w) {
    require_potentials(w, n, g);
    require_same_grid(psi, w[0].values(), "transform map");
    Field res(g, FieldRole::solution);
    std::vector<cplx> rhs(n);
    std::vector<cplx> x(n);
    for_each_active(g, [&](int i, int j) {
      for (int k = 0; k < n; ++k) rhs[k] = w[k](i, j);
      sys->solve(i, j, rhs, x, false);
      cplx acc = psi(i, j);
      for (int k = 0; k < n; ++k) acc -= (*f)[k].f(i, j) * x[k];
      res(i, j) = acc;
    });
    return res;
  };
  out.map_psi_plus = [f, sys, n, g](const Field& psi_plus, std::span<const Potential> v) {
    require_potentials(v, n, g);
    require_same_grid(psi_plus, v[0].values(), "transform map");
    Field res(g, FieldRole::conjugate_solution);
    std::vector<cplx> rhs(n);
    std::vector<cplx> x(n);
    for_each_active(g, [&](int i, int j) {
      for (int k = 0; k < n; ++k) rhs[k] = v[k](i, j);
      sys->solve(i, j, rhs, x, true);
      cplx acc = psi_plus(i, j);
      for (int k = 0; k < n; ++k) acc -= (*f)[k].f_plus(i, j) * x[k];
      res(i, j) = acc;
    });
    return res;
  };
  return out;
}

cplx constant_at(std::span<const cplx> cs, std::size_t k) { return k < cs.size() ? cs[k] : cplx{}; }

}  // namespace

SeedSet make_seed_set(Field u, std::vector<SeedPair> seeds, NodeIndex basepoint,
                      const std::vector<std::vector<cplx>>& constants, const OmegaOptions& options) {
  if (seeds.empty()) throw InvalidArgument("seed set needs at least one seed pair");
  for (const SeedPair& s : seeds) {
    require_same_grid(u, s.f, "seed set");
    require_same_grid(u, s.f_plus, "seed set");
  }
  const std::size_t n = seeds.size();
  SeedSet set{std::move(u), std::move(seeds), {}, basepoint};
  set.omega.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const cplx c = j < constants.size() && k < constants[j].size() ? constants[j][k] : cplx{};
      set.omega[j].push_back(omega(set.seeds[k].f, set.seeds[j].f_plus, basepoint, c, options));
    }
  }
  return set;
}

double max_seed_residual(const SeedSet& set) {
  double m = 0.0;
  for (const SeedPair& s : set.seeds) {
    m = std::max(m, residual(set.u, s.f, EquationKind::direct));
    m = std::max(m, residual(set.u, s.f_plus, EquationKind::conjugate));
  }
  return m;
}

Field TransformResult::apply_psi(const Field& psi, std::span<const cplx> constants) const {
  if (seeds.empty()) throw InvalidArgument("this transform needs its potentials supplied explicitly");
  std::vector<Potential> w;
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    w.push_back(omega(psi, seeds[j].f_plus, basepoint, constant_at(constants, j)));
  }
  return map_psi(psi, w);
}

Field TransformResult::apply_psi_plus(const Field& psi_plus, std::span<const cplx> constants) const {
  if (seeds.empty()) throw InvalidArgument("this transform needs its potentials supplied explicitly");
  std::vector<Potential> v;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    v.push_back(omega(seeds[k].f, psi_plus, basepoint, constant_at(constants, k)));
  }
  return map_psi_plus(psi_plus, v);
}

TransformResult moutard_simple(const Field& u, const Field& f, const Field& f_plus, const Potential& omega_ff,
                               NodeIndex basepoint) {
  require_same_grid(u, f, "moutard_simple");
  require_same_grid(u, f_plus, "moutard_simple");
  require_same_grid(u, omega_ff.values(), "moutard_simple");
  auto sys = std::make_shared<NodeSystem>(u.grid(), 1);
  for_each_active(u.grid(), [&](int i, int j) { sys->at(i, j, 0, 0) = omega_ff(i, j); });
  const Checked checked = check_system<ZeroPotentialError>(*sys, "potential omega_{f, f+}");
  return assemble(u, {SeedPair{f, f_plus}}, sys, checked, basepoint);
}

TransformResult moutard_rank_n(const SeedSet& set) {
  const int n = set.size();
  if (n == 0) throw InvalidArgument("seed set is empty");
  if (static_cast<int>(set.omega.size()) != n) throw ShapeError("potential matrix does not match the seed count");
  auto sys = std::make_shared<NodeSystem>(set.u.grid(), n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(set.omega[r].size()) != n) throw ShapeError("potential matrix is not square");
    for (int c = 0; c < n; ++c) {
      const Potential& p = set.omega[r][c];
      require_same_grid(set.u, p.values(), "moutard_rank_n");
      for_each_active(set.u.grid(), [&](int i, int j) { sys->at(i, j, r, c) = p(i, j); });
    }
  }
  const Checked checked = check_system<SingularOmegaError>(*sys, "det Omega");
  return assemble(set.u, set.seeds, sys, checked, set.basepoint);
}

Potential transformed_potential(const Potential& omega_pp, const Potential& omega_pf, const Potential& omega_fp,
                                const Potential& omega_ff, cplx c) {
  const GridSpec& g = omega_ff.grid();
  for (const Potential* p : {&omega_pp, &omega_pf, &omega_fp}) {
    require_same_grid(p->values(), omega_ff.values(), "transformed_potential");
  }
  double scale = 0.0;
  for_each_active(g, [&](int i, int j) { scale = std::max(scale, std::abs(omega_ff(i, j))); });
  Field out(g);
  for_each_active(g, [&](int i, int j) {
    const cplx w = omega_ff(i, j);
    if (std::abs(w) <= kDetRel * scale) {
      throw ZeroPotentialError("potential omega_{f, f+} vanishes at " + node_str(g, i, j));
    }
    out(i, j) = (omega_pp(i, j) * w - omega_pf(i, j) * omega_fp(i, j)) / w + c;
  });
  return Potential::from_values(std::move(out), omega_pp.basepoint(), 1e-10 * std::max(1.0, max_norm(out)));
}

TransformResult compose_simple(const Field& u, const SeedPair& first, const SeedPair& second, NodeIndex basepoint,
                               const ComposeConstants& cs, const OmegaOptions& options) {
  const Potential w11 = omega(first.f, first.f_plus, basepoint, cs.f1_f1p, options);
  const Potential w21 = omega(second.f, first.f_plus, basepoint, cs.f2_f1p, options);
  const Potential w12 = omega(first.f, second.f_plus, basepoint, cs.f1_f2p, options);
  const Potential w22 = omega(second.f, second.f_plus, basepoint, cs.f2_f2p, options);

  const TransformResult m1 = moutard_simple(u, first.f, first.f_plus, w11, basepoint);
  const Field f2t = m1.map_psi(second.f, std::span(&w21, 1));
  const Field f2pt = m1.map_psi_plus(second.f_plus, std::span(&w12, 1));
  const Potential w22t = transformed_potential(w22, w21, w12, w11, cs.second_stage);
  const TransformResult m2 = moutard_simple(m1.u_tilde, f2t, f2pt, w22t, basepoint);

  TransformResult out;
  out.N = 2;
  out.u_tilde = m2.u_tilde;
  out.det_omega_min = std::min(m1.det_omega_min, m2.det_omega_min);
  out.det_tol = std::max(m1.det_tol, m2.det_tol);
  out.seeds = {first, second};
  out.basepoint = basepoint;
  const cplx c2 = cs.second_stage;
  out.map_psi = [m1, m2, w11, w12, c2](const Field& psi, std::span<const Potential> w) {
    require_potentials(w, 2, psi.grid());
    const Field psi_t = m1.map_psi(psi, w.subspan(0, 1));
    const Potential carried = transformed_potential(w[1], w[0], w12, w11, c2);
    return m2.map_psi(psi_t, std::span(&carried, 1));
  };
  out.map_psi_plus = [m1, m2, w11, w21, c2](const Field& psi_plus, std::span<const Potential> v) {
    require_potentials(v, 2, psi_plus.grid());
    const Field psi_plus_t = m1.map_psi_plus(psi_plus, v.subspan(0, 1));
    const Potential carried = transformed_potential(v[1], w21, v[0], w11, c2);
    return m2.map_psi_plus(psi_plus_t, std::span(&carried, 1));
  };
  return out;
}

TransformResult invert_simple(const TransformResult& m1, const Field& f1, const Field& f1_plus,
                              const Potential& omega_ff) {
  const GridSpec& g = omega_ff.grid();
  require_same_grid(m1.u_tilde, omega_ff.values(), "invert_simple");
  Field f_hat(g, FieldRole::solution);
  Field f_hat_plus(g, FieldRole::conjugate_solution);
  Field w_hat(g);
  for_each_active(g, [&](int i, int j) {
    const cplx w = omega_ff(i, j);
    f_hat(i, j) = -kI * f1(i, j) / w;
    f_hat_plus(i, j) = -kI * f1_plus(i, j) / w;
    w_hat(i, j) = 1.0 / w;
  });
  const double tol = 1e-10 * std::max(1.0, max_norm(w_hat));
  const Potential omega_hat = Potential::from_values(std::move(w_hat), omega_ff.basepoint(), tol);
  TransformResult m2 = moutard_simple(m1.u_tilde, f_hat, f_hat_plus, omega_hat, omega_ff.basepoint());

  // Potentials of the transformed solutions against the new seeds.
  auto carry = [omega_ff](std::span<const Potential> p) {
    require_potentials(p, 1, omega_ff.grid());
    const GridSpec& grid = omega_ff.grid();
    Field out(grid);
    for_each_active(grid, [&](int i, int j) { out(i, j) = -kI * (p[0](i, j) / omega_ff(i, j)); });
    const NodeIndex b = omega_ff.basepoint();
    const cplx c = out(b.i, b.j);
    return Potential(std::move(out), {b, c});
  };
  TransformResult out = m2;
  out.seeds.clear();
  out.map_psi = [m2, carry](const Field& psi_t, std::span<const Potential> w) {
    const Potential carried = carry(w);
    return m2.map_psi(psi_t, std::span(&carried, 1));
  };
  out.map_psi_plus = [m2, carry](const Field& psi_plus_t, std::span<const Potential> v) {
    const Potential carried = carry(v);
    return m2.map_psi_plus(psi_plus_t, std::span(&carried, 1));
  };
  return out;
}

}  // namespace galab
