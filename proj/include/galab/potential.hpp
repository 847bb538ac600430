#pragma once

#include <optional>

#include "galab/field.hpp"
#include "galab/singular_model.hpp"

namespace galab {

/// Imaginary-valued potential omega with d/dz omega = psi psi+ and
/// d/dzbar omega = -conj(psi psi+), fixed by its value at a basepoint.
///
/// On grids with an excluded band each half-plane is integrated on its own;
/// `secondary` then records the basepoint and constant of the half that
/// does not contain `basepoint`.
class Potential {
 public:
  struct Anchor {
    NodeIndex node;
    cplx constant;
  };

  Potential() = default;
  Potential(Field values, Anchor primary, std::optional<Anchor> secondary = std::nullopt);

  const Field& values() const { return values_; }
  const GridSpec& grid() const { return values_.grid(); }
  cplx operator()(int i, int j) const { return values_(i, j); }
  cplx constant() const { return primary_.constant; }
  NodeIndex basepoint() const { return primary_.node; }
  const std::optional<Anchor>& secondary() const { return secondary_; }

  /// Largest |Re omega| seen before projection onto the imaginary axis.
  double max_real_drift() const { return max_real_drift_; }
  /// Largest |omega_xy - omega_yx| between the two L-path orders.
  double path_defect() const { return path_defect_; }

  void set_diagnostics(double real_drift, double path_defect) {
    max_real_drift_ = real_drift;
    path_defect_ = path_defect;
  }

  /// Wraps an arbitrary field as a potential after checking that it is
  /// imaginary to `tol` and projecting it. Used for potentials given in
  /// closed form or produced algebraically.
  static Potential from_values(Field values, NodeIndex basepoint, double tol = 1e-10);

 private:
  Field values_;
  Anchor primary_{};
  std::optional<Anchor> secondary_;
  double max_real_drift_ = 0.0;
  double path_defect_ = 0.0;
};

struct OmegaOptions {
  /// Allowed |omega_xy - omega_yx| relative to max(1, max |omega|).
  double exactness_tol = 1e-6;
  /// Allowed |Re omega| before projection.
  double real_drift_tol = 1e-10;
};

/// Builds omega_{psi, psi+} by fourth-order quadrature of
/// d omega = 2i Im(p) dx + 2i Re(p) dy, p = psi psi+, along the x-then-y
/// L-path from `basepoint`. Throws ExactnessError when the form is not closed
/// to tolerance (the pair is then not a conjugate solution pair).
Potential omega(const Field& psi, const Field& psi_plus, NodeIndex basepoint, cplx constant,
                const OmegaOptions& options = {});

/// Same as omega() but reports instead of throwing; used for diagnostics.
Potential omega_unchecked(const Field& psi, const Field& psi_plus, NodeIndex basepoint, cplx constant);

/// Potential built along the y-then-x L-path instead.
Potential omega_y_then_x(const Field& psi, const Field& psi_plus, NodeIndex basepoint, cplx constant);

/// Node-index rectangle, inclusive bounds.
struct NodeRect {
  int i0 = 0;
  int i1 = 0;
  int j0 = 0;
  int j1 = 0;
};

/// |closed integral of d omega| around the rectangle boundary.
double loop_defect(const Field& psi, const Field& psi_plus, const NodeRect& rect);

/// Potential of a pair of singular seeds. The 2i B(y) / x part, with
/// B = leading * leading_plus, is taken in closed form; the bounded
/// remainder is integrated numerically on each half-strip, and the two halves
/// are tied together so that the remainder extrapolates to `constant` at
/// x = 0 on the middle row.
///
/// Throws PositivityError unless leading * leading_plus > 0 on the grid rows.
Potential omega_singular(const SingularFieldModel& f, const SingularFieldModel& f_plus, cplx constant);

}  // namespace galab
