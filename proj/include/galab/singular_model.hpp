#pragma once

#include <functional>

#include "galab/field.hpp"
#include "galab/function_on_interval.hpp"

namespace galab {

/// A field with an explicit simple pole along x = 0:
///
///     value(x, y) = phase(y) * leading(y) / x + smooth_remainder(x, y)
///
/// `leading` is real and positive for admissible seeds, `phase` has unit
/// modulus and the remainder is C^1 up to x = 0 (it is only sampled on the
/// active columns of its grid).
struct SingularFieldModel {
  std::function<cplx(double)> phase;
  FunctionOnInterval leading;
  Field smooth_remainder;

  const GridSpec& grid() const { return smooth_remainder.grid(); }
  cplx value(int i, int j) const;
  /// Full singular field on the active nodes of the remainder grid.
  Field to_field() const;
};

}  // namespace galab
