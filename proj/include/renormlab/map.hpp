#pragma once

// Even unimodal maps f = h o Q_t on [-1,1], with Q_t(x) = -|x|^t and h a
// polynomial diffeomorphism of [-1,0] normalized by h(-1) = -1.

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/core.hpp"

namespace renormlab {

/// Anything that behaves like a C^1 self-map of [-1,1].
template <class F>
concept interval_map = requires(const F& f, double x) {
  { f(x) } -> std::convertible_to<double>;
  { f.derivative(x) } -> std::convertible_to<double>;
};

/// Dense polynomial in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  double derivative(double x) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * c_[i];
    return acc;
  }
  double second_derivative(double x) const {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 2;)
      acc = acc * x + static_cast<double>(i * (i - 1)) * c_[i];
    return acc;
  }
  const std::vector<double>& coeffs() const { return c_; }
  std::size_t degree() const { return c_.size() - 1; }

  /// Coefficients of p(x + a) in powers of x.
  Polynomial shifted(double a) const {
    std::vector<double> out(c_.size(), 0.0);
    // Repeated synthetic division (Taylor shift), O(d^2).
    std::vector<double> work = c_;
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (std::size_t i = work.size() - 1; i > k; --i) work[i - 1] += a * work[i];
      out[k] = work[k];
    }
    return Polynomial(std::move(out));
  }

 private:
  std::vector<double> c_{0.0};
};

/// f(x) = h(-|x|^t) on [-1,1]. Immutable after construction.
class UnimodalMap {
 public:
  static constexpr std::size_t kMaxDegree = 8;

  /// `h_coeffs` are ascending powers of y on [-1,0].
  UnimodalMap(double t, std::vector<double> h_coeffs, std::string label = {},
              const Tolerances& tol = {})
      : t_(t), y_coeffs_(std::move(h_coeffs)), label_(std::move(label)), slack_(tol.domain) {
    if (!(t_ > 1.0) || !std::isfinite(t_))
      throw ParameterError("critical exponent t must exceed 1, got " + std::to_string(t_));
    if (y_coeffs_.empty() || y_coeffs_.size() > kMaxDegree + 1)
      throw ParameterError("h must have between 1 and " + std::to_string(kMaxDegree + 1) +
                           " coefficients");
    // Evaluate in s = y + 1 so that h(-1) = -1 holds exactly.
    auto s_coeffs = Polynomial(y_coeffs_).shifted(-1.0).coeffs();
    if (std::fabs(s_coeffs[0] + 1.0) > 1e-12)
      throw ParameterError("h(-1) must equal -1, got " + std::to_string(s_coeffs[0]));
    s_coeffs[0] = -1.0;
    h_ = Polynomial(std::move(s_coeffs));
    c1_ = h_(1.0);
    if (!(c1_ > 0.0) || c1_ > 1.0 + 1e-15)
      throw ParameterError("h(0) must lie in (0,1], got " + std::to_string(c1_));
    constexpr int kGrid = 1024;
    for (int i = 0; i <= kGrid; ++i) {
      const double s = static_cast<double>(i) / kGrid;
      if (!(h_.derivative(s) > 0.0))
        throw ParameterError("h' must be positive on [-1,0]; fails at y = " +
                             std::to_string(s - 1.0));
    }
  }

  double exponent() const { return t_; }
  double critical_value() const { return c1_; }
  const std::vector<double>& h_coeffs() const { return y_coeffs_; }
  const std::string& label() const { return label_; }
  double domain_slack() const { return slack_; }

  /// c when h is the affine factor of f_c(x) = c - (1+c)|x|^t.
  std::optional<double> affine_parameter() const {
    if (y_coeffs_.size() == 2 && y_coeffs_[1] == 1.0 + y_coeffs_[0]) return y_coeffs_[0];
    return std::nullopt;
  }

  double factor(double y) const { return h_(y + 1.0); }
  double factor_derivative(double y) const { return h_.derivative(y + 1.0); }
  double factor_second_derivative(double y) const { return h_.second_derivative(y + 1.0); }

  double operator()(double x) const {
    check_domain(x);
    return h_(1.0 - detail::abs_pow(x, t_));
  }

  double derivative(double x) const {
    check_domain(x);
    if (x == 0.0) return 0.0;
    const double s = 1.0 - detail::abs_pow(x, t_);
    return h_.derivative(s) * q_prime(x);
  }

  /// One-sided limit at 0: -inf for t < 2, -2h'(0) for t = 2, 0 for t > 2.
  double second_derivative(double x) const {
    check_domain(x);
    if (x == 0.0) {
      if (t_ < 2.0) return -std::numeric_limits<double>::infinity();
      if (t_ == 2.0) return -2.0 * h_.derivative(1.0);
      return 0.0;
    }
    const double s = 1.0 - detail::abs_pow(x, t_);
    const double qp = q_prime(x);
    const double qpp = -t_ * (t_ - 1.0) * detail::abs_pow(x, t_ - 2.0);
    return h_.second_derivative(s) * qp * qp + h_.derivative(s) * qpp;
  }

  /// N(f)(x) = f''(x)/f'(x) = N(h)(Q(x)) Q'(x) + (t-1)/x.
  double nonlinearity(double x) const {
    check_domain(x);
    if (x == 0.0) throw CriticalProximityError("N(f) is singular at the critical point");
    const double s = 1.0 - detail::abs_pow(x, t_);
    return h_.second_derivative(s) / h_.derivative(s) * q_prime(x) + (t_ - 1.0) / x;
  }

 private:
  double q_prime(double x) const {
    return -t_ * detail::abs_pow(x, t_ - 1.0) * detail::sign(x);
  }
  void check_domain(double x) const {
    if (!(std::fabs(x) <= 1.0 + slack_))
      throw DomainError("point " + std::to_string(x) + " outside [-1,1]");
  }

  double t_;
  std::vector<double> y_coeffs_;
  std::string label_;
  double slack_;
  Polynomial h_;  // in s = y + 1
  double c1_ = 0.0;
};

/// f_c(x) = c - (1+c)|x|^t, the representative with N(h) == 0.
inline UnimodalMap make_affine_family(double t, double c, const Tolerances& tol = {}) {
  if (!(c > 0.0 && c <= 1.0))
    throw ParameterError("critical value c must lie in (0,1], got " + std::to_string(c));
  return UnimodalMap(t, {c, 1.0 + c}, {}, tol);
}

inline double eval(const UnimodalMap& f, double x) { return f(x); }
inline double deriv(const UnimodalMap& f, double x) { return f.derivative(x); }
inline double deriv2(const UnimodalMap& f, double x) { return f.second_derivative(x); }

/// N(h)(y) = h''(y)/h'(y) for y in [-1,0].
inline double factor_nonlinearity(const UnimodalMap& f, double y, const Tolerances& tol = {}) {
  if (y < -1.0 - tol.domain || y > tol.domain)
    throw DomainError("factor argument " + std::to_string(y) + " outside [-1,0]");
  const double d = f.factor_derivative(y);
  if (std::fabs(d) < tol.derivative)
    throw DegenerateDerivativeError("h'(" + std::to_string(y) + ") vanishes");
  return f.factor_second_derivative(y) / d;
}

/// N(u o v)(x) from N(u) at v(x), v'(x) and N(v)(x).
inline double compose_nonlinearity(double n_outer, double inner_derivative, double n_inner) {
  return n_outer * inner_derivative + n_inner;
}

/// [x, f(x), ..., f^n(x)]; throws EscapeError if an iterate leaves [-1,1].
template <interval_map F>
std::vector<double> orbit(const F& f, double x, int n, double slack = Tolerances{}.domain) {
  if (n < 0) throw ParameterError("orbit length must be non-negative");
  if (std::fabs(x) > 1.0 + slack) throw DomainError("orbit seed outside [-1,1]");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(x);
  for (int i = 0; i < n; ++i) {
    x = f(x);
    if (!std::isfinite(x) || std::fabs(x) > 1.0 + slack)
      throw EscapeError("iterate " + std::to_string(i + 1) + " left [-1,1]");
    out.push_back(x);
  }
  return out;
}

}  // namespace renormlab
