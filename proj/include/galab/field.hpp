#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace galab {

using cplx = std::complex<double>;

/// Uniform node-centred sampling of the rectangle [x_min, x_max] x [y_min, y_max].
///
/// Node (i, j) sits at x_min + i*hx, y_min + j*hy and lives at flat index
/// j*nx + i, so storage is row-major in y then x. When `excluded_band` is set,
/// every column with |x| < excluded_band is masked out: its values are never
/// evaluated and it does not enter any norm.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  int nx = 0;
  int ny = 0;
  std::optional<double> excluded_band;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return i == nx - 1 ? x_max : x_min + i * hx(); }
  double y(int j) const { return j == ny - 1 ? y_max : y_min + j * hy(); }
  cplx z(int i, int j) const { return {x(i), y(j)}; }
  bool excluded(int i) const { return excluded_band && std::abs(x(i)) < *excluded_band; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  /// Same rectangle and band, different resolution.
  GridSpec with_resolution(int new_nx, int new_ny) const;

  bool operator==(const GridSpec&) const = default;
};

struct NodeIndex {
  int i = 0;
  int j = 0;
  bool operator==(const NodeIndex&) const = default;
};

enum class FieldRole { coefficient, solution, conjugate_solution, generic };

/// Complex-valued function sampled on a GridSpec. Excluded nodes hold NaN.
class Field {
 public:
  Field() = default;
  explicit Field(GridSpec grid, FieldRole role = FieldRole::generic);
  Field(GridSpec grid, std::vector<cplx> values, FieldRole role = FieldRole::generic);

  /// Evaluates fn(x, y) at every non-excluded node.
  static Field sample(const GridSpec& grid, const std::function<cplx(double, double)>& fn,
                      FieldRole role = FieldRole::generic);

  const GridSpec& grid() const { return grid_; }
  FieldRole role() const { return role_; }
  Field& with_role(FieldRole role) {
    role_ = role;
    return *this;
  }

  cplx operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  cplx& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  /// Applies op node-wise on active (non-excluded) nodes.
  Field map(const std::function<cplx(cplx)>& op) const;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(const Field& rhs);
  Field& operator/=(const Field& rhs);
  Field& operator*=(cplx s);
  Field& operator+=(cplx s);

  /// Throws InvalidArgument if any active node is not finite.
  void check_finite(const char* what) const;

 private:
  template <class Op>
  Field& combine(const Field& rhs, Op op, const char* what);

  GridSpec grid_;
  std::vector<cplx> values_;
  FieldRole role_ = FieldRole::generic;
};

Field operator+(Field lhs, const Field& rhs);
Field operator-(Field lhs, const Field& rhs);
Field operator*(Field lhs, const Field& rhs);
Field operator/(Field lhs, const Field& rhs);
Field operator*(Field f, cplx s);
Field operator*(cplx s, Field f);
Field operator+(Field f, cplx s);
Field operator-(Field f);
Field conj(const Field& f);

/// Throws ShapeError unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b, const char* what);

/// Calls fn(i, j) for every non-excluded node.
void for_each_active(const GridSpec& grid, const std::function<void(int, int)>& fn);

double max_norm(const Field& f);
double max_abs_diff(const Field& a, const Field& b);
/// max |a - b| / max(1, max |b|).
double max_rel_diff(const Field& a, const Field& b);

// Derivatives. Excluded columns split each row into independent segments that
// are differenced with one-sided stencils at their ends.
Field dx(const Field& f);
Field dy(const Field& f);
/// (d/dx + i d/dy) / 2
Field dbar(const Field& f);
/// (d/dx - i d/dy) / 2
Field dz(const Field& f);

enum class EquationKind { direct, conjugate };

/// Node-wise defect of dbar(psi) = u conj(psi) (direct) or
/// dbar(psi) = -conj(u) conj(psi) (conjugate).
Field residual_field(const Field& u, const Field& psi, EquationKind kind);
double residual(const Field& u, const Field& psi, EquationKind kind);

/// Local bicubic (4x4 Lagrange) interpolation. Exact at nodes. Throws
/// InvalidArgument outside the grid rectangle or when the stencil touches an
/// excluded column.
cplx interpolate(const Field& f, cplx at);

/// CSV with header `x,y,re,im`, rows ordered by y then x, excluded nodes skipped.
void write_csv(std::ostream& out, const Field& f);

}  // namespace galab
