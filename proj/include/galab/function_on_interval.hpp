#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace galab {

using cplx = std::complex<double>;

/// Complex function of y on [a, b], held either as exact polynomial
/// coefficients (ascending powers of y) or as samples on a uniform grid.
///
/// Polynomial mode differentiates exactly; sampled mode uses the same
/// fourth-order stencils as grid fields and cubic interpolation between
/// samples. Mixing a polynomial with a sampled operand resamples the
/// polynomial; two sampled operands must share their grid.
class FunctionOnInterval {
 public:
  enum class Mode { polynomial, sampled };

  static constexpr int kMaxDegree = 16;

  FunctionOnInterval() : FunctionOnInterval(polynomial(0.0, 1.0, {})) {}

  static FunctionOnInterval polynomial(double a, double b, std::vector<cplx> coeffs);
  static FunctionOnInterval constant(double a, double b, cplx value);
  static FunctionOnInterval sampled(double a, double b, std::vector<cplx> samples);
  static FunctionOnInterval sample(double a, double b, int n, const std::function<cplx(double)>& fn);

  Mode mode() const { return mode_; }
  double a() const { return a_; }
  double b() const { return b_; }
  /// Polynomial degree (-1 for the zero polynomial). Sampled mode: -1.
  int degree() const;
  std::span<const cplx> coefficients() const { return data_; }
  std::span<const cplx> samples() const { return data_; }
  int sample_count() const { return static_cast<int>(data_.size()); }

  cplx operator()(double y) const;
  FunctionOnInterval derivative() const;
  FunctionOnInterval conj() const;
  FunctionOnInterval real_part() const;
  FunctionOnInterval imag_part() const;

  /// Evaluation nodes for sampled checks: the sample grid in sampled mode,
  /// otherwise `count` uniform nodes on [a, b].
  std::vector<double> nodes(int count) const;

  /// Same function in sampled mode on `n` uniform nodes.
  FunctionOnInterval resampled(int n) const;

  FunctionOnInterval& operator+=(const FunctionOnInterval& rhs);
  FunctionOnInterval& operator-=(const FunctionOnInterval& rhs);
  FunctionOnInterval& operator*=(const FunctionOnInterval& rhs);
  FunctionOnInterval& operator*=(cplx s);
  FunctionOnInterval& operator+=(cplx s);

 private:
  FunctionOnInterval(Mode mode, double a, double b, std::vector<cplx> data);
  void trim();
  // Brings two operands to a common representation.
  static void align(FunctionOnInterval& lhs, FunctionOnInterval& rhs);

  Mode mode_ = Mode::polynomial;
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<cplx> data_;
};

FunctionOnInterval operator+(FunctionOnInterval lhs, const FunctionOnInterval& rhs);
FunctionOnInterval operator-(FunctionOnInterval lhs, const FunctionOnInterval& rhs);
FunctionOnInterval operator*(FunctionOnInterval lhs, const FunctionOnInterval& rhs);
FunctionOnInterval operator*(FunctionOnInterval f, cplx s);
FunctionOnInterval operator*(cplx s, FunctionOnInterval f);
FunctionOnInterval operator+(FunctionOnInterval f, cplx s);
FunctionOnInterval operator-(FunctionOnInterval f);

/// max over `nodes` of |f(y)|, with the arg-max written to *where if given.
double sup_norm(const FunctionOnInterval& f, std::span<const double> nodes, double* where = nullptr);

}  // namespace galab
