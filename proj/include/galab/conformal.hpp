#pragma once

#include <functional>
#include <optional>
#include <string>

#include "galab/field.hpp"

namespace galab {

using ComplexFn = std::function<cplx(cplx)>;

/// Holomorphic map tau -> z(tau) from the strip grid into the z-plane.
struct HolomorphicChart {
  std::string name;
  ComplexFn forward;
  ComplexFn derivative;
  /// Optional closed-form inverse; Newton iteration from the strip centre
  /// is used when absent.
  std::optional<ComplexFn> inverse;
  GridSpec strip;
  /// Set when z(tau) maps the strip nodes onto the nodes of an axis-aligned
  /// grid (identity and positive scalings).
  bool maps_nodes_to_grid = false;

  static HolomorphicChart identity(const GridSpec& strip);
  /// z = a tau with a > 0.
  static HolomorphicChart scaling(double a, const GridSpec& strip);
  /// z = exp(i theta) tau.
  static HolomorphicChart rotation(double theta, const GridSpec& strip);
  /// z = exp(tau).
  static HolomorphicChart exponential(const GridSpec& strip);
  static HolomorphicChart from_closures(std::string name, ComplexFn forward, ComplexFn derivative,
                                        std::optional<ComplexFn> inverse, const GridSpec& strip);

  /// tau with z(tau) = z.
  cplx invert(cplx z) const;
};

/// Throws DegenerateChartError when |z'| < 1e-12 at a node, when z' does
/// not match a difference quotient of z, or when z -> tau fails to return
/// the node it came from (which also rules out two nodes sharing an image).
void validate_chart(const HolomorphicChart& chart);

/// Axis-aligned grid in the z-plane covering the image of the strip nodes.
/// For node-mapping charts its nodes are exactly the images.
GridSpec domain_grid(const HolomorphicChart& chart);

enum class SqrtBranch { principal, negated };

/// sqrt(z'(tau)) continued from the principal value at the strip centre.
/// Throws BranchError when arg z' jumps by more than pi/2 between neighbours.
Field sqrt_derivative(const HolomorphicChart& chart, SqrtBranch branch = SqrtBranch::principal);

/// u*(tau) = u(z(tau)) |z'(tau)|.
Field pushforward_u(const ComplexFn& u, const HolomorphicChart& chart);
/// Same, sampling a z-plane field by local bicubic interpolation.
Field pushforward_u(const Field& u_on_domain, const HolomorphicChart& chart);

/// psi*(tau) = psi(z(tau)) sqrt(z'(tau)).
Field pushforward_psi(const ComplexFn& psi, const HolomorphicChart& chart,
                      SqrtBranch branch = SqrtBranch::principal);
Field pushforward_psi(const Field& psi_on_domain, const HolomorphicChart& chart,
                      SqrtBranch branch = SqrtBranch::principal);

/// omega*(tau) = omega(z(tau)), sampled by interpolation.
Field pullback_scalar(const Field& on_domain, const HolomorphicChart& chart);

/// Data of a simple transform on the z-side, given in closed form.
struct CommutativityProbe {
  ComplexFn u;
  ComplexFn f;
  ComplexFn f_plus;
  ComplexFn psi;
  cplx omega_ff_constant{};
  cplx omega_psi_constant{};
};

struct CommutativityReport {
  /// max |pushforward(u~) - (u*)~| on the strip.
  double u_deviation = 0.0;
  /// max |pushforward(psi~) - (psi*)~| on the strip.
  double psi_deviation = 0.0;
  /// max |d/dtau omega* - f* f+*| for the transported seed potential.
  double potential_derivative_defect = 0.0;
  GridSpec domain;

  double deviation() const { return std::max(u_deviation, psi_deviation); }
};

/// Compares the simple transform computed in z and pushed to the strip with
/// the transform of the pushed-forward data computed in tau. The tau-side
/// potentials are integrated on the strip, anchored at the strip centre to
/// the z-side value there.
CommutativityReport check_commutativity(const CommutativityProbe& probe, const HolomorphicChart& chart);

}  // namespace galab
