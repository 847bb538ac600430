#include "galab/function_on_interval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "galab/detail/stencil.hpp"
#include "galab/error.hpp"

namespace galab {

using Mode = FunctionOnInterval::Mode;

FunctionOnInterval::FunctionOnInterval(Mode mode, double a, double b, std::vector<cplx> data)
    : mode_(mode), a_(a), b_(b), data_(std::move(data)) {
  if (!(a_ < b_)) throw InvalidArgument("function interval needs a < b");
  if (mode_ == Mode::sampled && data_.size() < static_cast<std::size_t>(detail::kStencilWidth)) {
    throw InvalidArgument("sampled function needs at least 5 samples");
  }
  trim();
}

void FunctionOnInterval::trim() {
  if (mode_ != Mode::polynomial) return;
  while (!data_.empty() && data_.back() == cplx{}) data_.pop_back();
  if (degree() > kMaxDegree) {
    throw DegreeError("polynomial degree " + std::to_string(degree()) + " exceeds the limit of " +
                      std::to_string(kMaxDegree));
  }
}

FunctionOnInterval FunctionOnInterval::polynomial(double a, double b, std::vector<cplx> coeffs) {
  return {Mode::polynomial, a, b, std::move(coeffs)};
}

FunctionOnInterval FunctionOnInterval::constant(double a, double b, cplx value) {
  return polynomial(a, b, {value});
}

FunctionOnInterval FunctionOnInterval::sampled(double a, double b, std::vector<cplx> samples) {
  return {Mode::sampled, a, b, std::move(samples)};
}

FunctionOnInterval FunctionOnInterval::sample(double a, double b, int n,
                                              const std::function<cplx(double)>& fn) {
  if (n < detail::kStencilWidth) throw InvalidArgument("sampled function needs at least 5 samples");
  std::vector<cplx> s(n);
  for (int k = 0; k < n; ++k) s[k] = fn(k == n - 1 ? b : a + k * (b - a) / (n - 1));
  return sampled(a, b, std::move(s));
}

int FunctionOnInterval::degree() const {
  return mode_ == Mode::polynomial ? static_cast<int>(data_.size()) - 1 : -1;
}

cplx FunctionOnInterval::operator()(double y) const {
  if (mode_ == Mode::polynomial) {
    cplx acc{};
    for (auto it = data_.rbegin(); it != data_.rend(); ++it) acc = acc * y + *it;
    return acc;
  }
  const int n = sample_count();
  const double h = (b_ - a_) / (n - 1);
  const double s = (y - a_) / h;
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-12 && r >= 0 && r <= n - 1) return data_[static_cast<std::size_t>(r)];
  const int k = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, n - 4);
  const double t[4] = {a_ + k * h, a_ + (k + 1) * h, a_ + (k + 2) * h, a_ + (k + 3) * h};
  return detail::lagrange_eval(t, std::span<const cplx>(data_).subspan(k, 4), y);
}

FunctionOnInterval FunctionOnInterval::derivative() const {
  if (mode_ == Mode::polynomial) {
    std::vector<cplx> d;
    for (std::size_t k = 1; k < data_.size(); ++k) d.push_back(static_cast<double>(k) * data_[k]);
    return polynomial(a_, b_, std::move(d));
  }
  return sampled(a_, b_, detail::derivative(data_, (b_ - a_) / (sample_count() - 1)));
}

FunctionOnInterval FunctionOnInterval::conj() const {
  FunctionOnInterval out = *this;
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

FunctionOnInterval FunctionOnInterval::real_part() const {
  FunctionOnInterval out = *this;
  for (auto& v : out.data_) v = v.real();
  out.trim();
  return out;
}

FunctionOnInterval FunctionOnInterval::imag_part() const {
  FunctionOnInterval out = *this;
  for (auto& v : out.data_) v = v.imag();
  out.trim();
  return out;
}

std::vector<double> FunctionOnInterval::nodes(int count) const {
  const int n = mode_ == Mode::sampled ? sample_count() : count;
  std::vector<double> ys(n);
  for (int k = 0; k < n; ++k) ys[k] = k == n - 1 ? b_ : a_ + k * (b_ - a_) / (n - 1);
  return ys;
}

FunctionOnInterval FunctionOnInterval::resampled(int n) const {
  return sample(a_, b_, n, [this](double y) { return (*this)(y); });
}

void FunctionOnInterval::align(FunctionOnInterval& lhs, FunctionOnInterval& rhs) {
  if (lhs.a_ != rhs.a_ || lhs.b_ != rhs.b_) {
    throw ShapeError("interval functions are defined on different intervals");
  }
  if (lhs.mode_ == rhs.mode_) {
    if (lhs.mode_ == Mode::sampled && lhs.sample_count() != rhs.sample_count()) {
      throw ShapeError("sampled interval functions use different sample grids");
    }
    return;
  }
  if (lhs.mode_ == Mode::polynomial) lhs = lhs.resampled(rhs.sample_count());
  else rhs = rhs.resampled(lhs.sample_count());
}

FunctionOnInterval& FunctionOnInterval::operator+=(const FunctionOnInterval& rhs_in) {
  FunctionOnInterval rhs = rhs_in;
  align(*this, rhs);
  if (data_.size() < rhs.data_.size()) data_.resize(rhs.data_.size());
  for (std::size_t k = 0; k < rhs.data_.size(); ++k) data_[k] += rhs.data_[k];
  trim();
  return *this;
}

FunctionOnInterval& FunctionOnInterval::operator-=(const FunctionOnInterval& rhs) {
  return *this += -rhs;
}

FunctionOnInterval& FunctionOnInterval::operator*=(const FunctionOnInterval& rhs_in) {
  FunctionOnInterval rhs = rhs_in;
  align(*this, rhs);
  if (mode_ == Mode::sampled) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] *= rhs.data_[k];
    return *this;
  }
  if (data_.empty() || rhs.data_.empty()) {
    data_.clear();
    return *this;
  }
  std::vector<cplx> prod(data_.size() + rhs.data_.size() - 1);
  for (std::size_t p = 0; p < data_.size(); ++p) {
    for (std::size_t q = 0; q < rhs.data_.size(); ++q) prod[p + q] += data_[p] * rhs.data_[q];
  }
  data_ = std::move(prod);
  trim();
  return *this;
}

FunctionOnInterval& FunctionOnInterval::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  trim();
  return *this;
}

FunctionOnInterval& FunctionOnInterval::operator+=(cplx s) {
  if (mode_ == Mode::polynomial) {
    if (data_.empty()) data_.push_back(cplx{});
    data_[0] += s;
    trim();
  } else {
    for (auto& v : data_) v += s;
  }
  return *this;
}

FunctionOnInterval operator+(FunctionOnInterval lhs, const FunctionOnInterval& rhs) { return lhs += rhs; }
FunctionOnInterval operator-(FunctionOnInterval lhs, const FunctionOnInterval& rhs) { return lhs -= rhs; }
FunctionOnInterval operator*(FunctionOnInterval lhs, const FunctionOnInterval& rhs) { return lhs *= rhs; }
FunctionOnInterval operator*(FunctionOnInterval f, cplx s) { return f *= s; }
FunctionOnInterval operator*(cplx s, FunctionOnInterval f) { return f *= s; }
FunctionOnInterval operator+(FunctionOnInterval f, cplx s) { return f += s; }
FunctionOnInterval operator-(FunctionOnInterval f) { return f *= -1.0; }

double sup_norm(const FunctionOnInterval& f, std::span<const double> nodes, double* where) {
  double best = 0.0;
  double at = nodes.empty() ? f.a() : nodes.front();
  for (double y : nodes) {
    const double v = std::abs(f(y));
    if (v > best) {
      best = v;
      at = y;
    }
  }
  if (where) *where = at;
  return best;
}

}  // namespace galab
