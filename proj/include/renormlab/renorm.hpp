#pragma once

// Renormalization of even unimodal maps: restricted intervals, return times,
// the rescaled first-return map and the tower of successive renormalizations.
//
// Every renormalized map is kept as composition data over the base map:
//   f_k(x) = S_k * f^{m_k}(x / S_k),
// where S_k is the product of the (signed) linear rescalings. Nothing is ever
// refit, so all derived quantities come from the base map directly.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/core.hpp"
#include "renormlab/map.hpp"
#include "renormlab/rootfind.hpp"

namespace renormlab {

/// Value, first derivative and nonlinearity of an iterate f^m at a point.
struct Jet {
  double value = 0.0;
  double derivative = 1.0;
  double nonlinearity = 0.0;
};

/// Jet of f^m at z. N accumulates as sum_j N(f)(z_j) (f^j)'(z); the orbit
/// must stay `critical_radius` away from 0.
inline Jet iterate_jet(const UnimodalMap& f, double z, long m, double critical_radius = 0.0) {
  Jet j{z, 1.0, 0.0};
  for (long i = 0; i < m; ++i) {
    if (std::fabs(j.value) <= critical_radius)
      throw CriticalProximityError("orbit passes within " + std::to_string(critical_radius) +
                                   " of the critical point");
    j.nonlinearity += f.nonlinearity(j.value) * j.derivative;
    j.derivative *= f.derivative(j.value);
    j.value = f(j.value);
  }
  return j;
}

/// f_k(x) = scale * f^{iterates}(x / scale) for a shared base map f.
class RescaledIterate {
 public:
  explicit RescaledIterate(std::shared_ptr<const UnimodalMap> base, long iterates = 1,
                           double scale = 1.0)
      : base_(std::move(base)), m_(iterates), scale_(scale) {}
  explicit RescaledIterate(const UnimodalMap& base)
      : RescaledIterate(std::make_shared<const UnimodalMap>(base)) {}

  const UnimodalMap& base() const { return *base_; }
  const std::shared_ptr<const UnimodalMap>& base_ptr() const { return base_; }
  long iterates() const { return m_; }
  double scale() const { return scale_; }
  double exponent() const { return base_->exponent(); }

  double operator()(double x) const {
    check_domain(x);
    double z = x / scale_;
    for (long i = 0; i < m_; ++i) z = (*base_)(z);
    return scale_ * z;
  }

  double derivative(double x) const {
    check_domain(x);
    double z = x / scale_;
    double d = 1.0;
    for (long i = 0; i < m_; ++i) {
      d *= base_->derivative(z);
      z = (*base_)(z);
    }
    return d;
  }

  /// N(f_k)(x) = N(f^m)(x/S) / S.
  double nonlinearity(double x, double critical_radius = 0.0) const {
    check_domain(x);
    return iterate_jet(*base_, x / scale_, m_, critical_radius).nonlinearity / scale_;
  }

  double second_derivative(double x) const { return nonlinearity(x) * derivative(x); }

  double critical_value() const { return (*this)(0.0); }

  /// f_k^n, still as composition data.
  RescaledIterate power(long n) const { return RescaledIterate(base_, m_ * n, scale_); }

  /// N(h_k)(y), where f_k = h_k o Q_t. Uses h_k(y) = S f^{m-1}(h(y/|S|^t)),
  /// which avoids the removable singularity of N(f_k) at 0.
  double factor_nonlinearity(double y) const {
    const double t = base_->exponent();
    const double st = std::pow(std::fabs(scale_), t);
    const double u = y / st;
    const double hp = base_->factor_derivative(u);
    const double nh = base_->factor_second_derivative(u) / hp;
    const Jet rest = iterate_jet(*base_, base_->factor(u), m_ - 1);
    return compose_nonlinearity(rest.nonlinearity, hp, nh) / st;
  }

 private:
  void check_domain(double x) const {
    if (!(std::fabs(x) <= 1.0 + base_->domain_slack()))
      throw DomainError("point " + std::to_string(x) + " outside [-1,1]");
  }

  std::shared_ptr<const UnimodalMap> base_;
  long m_;
  double scale_;
};

/// n-th iterate of an interval map.
template <interval_map F>
double iterate(const F& f, double x, long n) {
  for (long i = 0; i < n; ++i) x = f(x);
  return x;
}

inline double iterate(const RescaledIterate& f, double x, long n) { return f.power(n)(x); }

/// Image of an interval under an even unimodal map with its maximum at 0.
template <interval_map F>
Interval interval_image(const F& f, const Interval& iv) {
  const double a = f(iv.lo);
  const double b = f(iv.hi);
  if (iv.lo < 0.0 && iv.hi > 0.0) return {std::min(a, b), f(0.0)};
  return Interval::hull(a, b);
}

/// Image under the n-th iterate, pushed one application at a time.
template <interval_map F>
Interval interval_image(const F& f, Interval iv, long n) {
  for (long i = 0; i < n; ++i) iv = interval_image(f, iv);
  return iv;
}

/// A point p in the bracket with f^period(p) = p.
template <interval_map F>
double find_periodic_point(const F& f, int period, Bracket bracket, const Tolerances& tol = {}) {
  if (period < 1) throw ParameterError("period must be positive");
  const auto phi = [&](double x) { return iterate(f, x, period) - x; };
  const double p = bisect(phi, bracket.lo, bracket.hi, tol.bisection_budget);
  const double residual = std::fabs(phi(p));
  if (residual > tol.root)
    throw NonConvergenceError("periodic point residual " + std::to_string(residual), residual);
  return p;
}

enum class Orientation { MinimumAtZero, MaximumAtZero };

inline const char* to_string(Orientation o) {
  return o == Orientation::MinimumAtZero ? "minimum" : "maximum";
}

/// A detected restricted interval J = [-p, p] of return time n.
struct Renormalization {
  int n = 0;
  double p = 0.0;
  double fixed_endpoint = 0.0;  ///< the signed endpoint with f^n(x) = x
  Orientation orientation = Orientation::MinimumAtZero;
  std::vector<Interval> cycle;  ///< f^j(J), j = 0..n-1
  std::vector<int> shuffle;     ///< left-to-right rank of each cycle interval

  Interval restricted_interval() const { return {-p, p}; }
};

namespace detail {

template <interval_map F>
std::optional<Renormalization> validate_restricted(const F& f, int n, double x,
                                                   const Tolerances& tol) {
  const double p = std::fabs(x);
  Renormalization r;
  r.n = n;
  r.p = p;
  r.fixed_endpoint = x;
  Interval cur{-p, p};
  r.cycle.push_back(cur);
  for (int j = 1; j <= n; ++j) {
    cur = interval_image(f, cur);
    if (j < n) {
      for (const auto& prev : r.cycle)
        if (prev.overlap(cur) > tol.renorm) return std::nullopt;
      r.cycle.push_back(cur);
    }
  }
  if (!r.cycle.front().contains(cur, tol.renorm)) return std::nullopt;
  // The rescaled critical value -f^n(0)/x must not be negative.
  if (-iterate(f, 0.0, n) / x < -tol.renorm) return std::nullopt;
  r.orientation = x > 0.0 ? Orientation::MinimumAtZero : Orientation::MaximumAtZero;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return r.cycle[a].lo < r.cycle[b].lo; });
  r.shuffle.assign(static_cast<std::size_t>(n), 0);
  for (int rank = 0; rank < n; ++rank) r.shuffle[order[rank]] = rank;
  return r;
}

}  // namespace detail

/// Smallest return time n in [2, maxN] admitting a restricted interval.
/// Among periodic endpoints of the same n the largest valid p wins.
template <interval_map F>
std::optional<Renormalization> detect_renormalization(const F& f, int max_n,
                                                      const Tolerances& tol = {},
                                                      int cells_per_period = 2048) {
  if (max_n < 2) throw ParameterError("maxN must be at least 2");
  for (int n = 2; n <= max_n; ++n) {
    const auto phi = [&](double x) { return iterate(f, x, n) - x; };
    std::vector<double> roots;
    for (const Bracket& b : sign_changes(phi, -1.0, 1.0, cells_per_period * n)) {
      const double x = b.lo == b.hi ? b.lo : bisect(phi, b.lo, b.hi, tol.bisection_budget);
      const double p = std::fabs(x);
      if (p < tol.conditioning || p > 1.0 - tol.renorm) continue;
      if (std::fabs(phi(x)) > tol.root) continue;
      roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end(),
              [](double a, double b) { return std::fabs(a) > std::fabs(b); });
    for (double x : roots)
      if (auto r = detail::validate_restricted(f, n, x, tol)) return r;
  }
  return std::nullopt;
}

/// Result of one renormalization step.
struct RenormStep {
  RescaledIterate next;
  double alpha_slope;  ///< alpha(x) = alpha_slope * x, alpha(J) = [-1,1]
  double c1;           ///< critical value of the renormalized map
  bool boundary;       ///< c1 == 0 within tolerance: superstable, on the edge of the class
};

/// f_next = alpha o f^n o alpha^{-1}, with alpha's sign chosen so that f_next
/// has its maximum at 0 and f_next(+-1) = -1.
inline RenormStep renormalize(const RescaledIterate& f, const Renormalization& r,
                              const Tolerances& tol = {}) {
  const double alpha = -1.0 / r.fixed_endpoint;
  RescaledIterate next(f.base_ptr(), f.iterates() * r.n, f.scale() * alpha);
  const double c1 = next(0.0);
  if (c1 < -tol.renorm)
    throw NormalizationError("renormalized critical value " + std::to_string(c1) + " <= 0");
  for (double e : {-1.0, 1.0}) {
    const double v = next(e);
    if (std::fabs(v + 1.0) > tol.renorm)
      throw NormalizationError("renormalized map sends " + std::to_string(e) + " to " +
                               std::to_string(v) + " instead of -1");
  }
  return {std::move(next), alpha, c1, std::fabs(c1) <= tol.renorm};
}

inline RenormStep renormalize(const UnimodalMap& f, const Renormalization& r,
                              const Tolerances& tol = {}) {
  return renormalize(RescaledIterate(f), r, tol);
}

struct RenormLevel {
  int k = 0;
  int n = 0;             ///< return time n_k
  long m = 0;            ///< m_k = n_1 ... n_k
  Interval J;            ///< restricted interval in the coordinates of f_{k-1}
  double fixed_endpoint; ///< signed J endpoint fixed by f_{k-1}^{n_k}
  double alpha_slope = 0.0;
  Orientation orientation = Orientation::MinimumAtZero;
  std::vector<int> shuffle;
  RescaledIterate map;   ///< f_k
  double c1 = 0.0;
  bool boundary = false;
  double periodic_residual = 0.0;  ///< |f^{m_k}(p_k) - p_k| in base coordinates
};

class RenormTower {
 public:
  explicit RenormTower(std::shared_ptr<const UnimodalMap> base)
      : base_(std::move(base)), I_{{-1.0, 1.0}} {}

  const UnimodalMap& base() const { return *base_; }
  const std::shared_ptr<const UnimodalMap>& base_ptr() const { return base_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const std::vector<RenormLevel>& levels() const { return levels_; }
  const RenormLevel& level(int k) const { return levels_.at(static_cast<std::size_t>(k - 1)); }

  /// f_k; f_0 is the base map itself.
  RescaledIterate map_at(int k) const { return k == 0 ? RescaledIterate(base_) : level(k).map; }
  /// m_k, with m_0 = 1.
  long period(int k) const { return k == 0 ? 1 : level(k).m; }
  /// I_k in base coordinates, I_0 = [-1,1].
  const Interval& nested(int k) const { return I_.at(static_cast<std::size_t>(k)); }
  /// Periodic endpoint p_k of I_k, k >= 1, in base coordinates.
  double periodic_endpoint(int k) const { return p_.at(static_cast<std::size_t>(k - 1)); }

  bool truncated() const { return truncated_; }
  const std::string& truncation_reason() const { return truncation_reason_; }

  void push(RenormLevel level, double p_base) {
    const double half = 1.0 / std::fabs(level.map.scale());
    I_.push_back({-half, half});
    p_.push_back(p_base);
    levels_.push_back(std::move(level));
  }
  void truncate(std::string reason) {
    truncated_ = true;
    truncation_reason_ = std::move(reason);
  }

 private:
  std::shared_ptr<const UnimodalMap> base_;
  std::vector<RenormLevel> levels_;
  std::vector<Interval> I_;
  std::vector<double> p_;
  bool truncated_ = false;
  std::string truncation_reason_;
};

/// Renormalizes up to `depth` times. Throws NotRenormalizableError(k) when
/// level k admits no restricted interval; stops early (truncated) when the
/// composition becomes too ill-conditioned for double precision.
inline RenormTower build_tower(const UnimodalMap& f, int depth, int max_n,
                               const Tolerances& tol = {}) {
  if (depth < 1) throw ParameterError("tower depth must be at least 1");
  auto base = std::make_shared<const UnimodalMap>(f);
  RenormTower tower(base);
  RescaledIterate current(base);
  for (int k = 1; k <= depth; ++k) {
    auto det = detect_renormalization(current, max_n, tol);
    if (!det) throw NotRenormalizableError(k);
    RenormStep step = renormalize(current, *det, tol);
    const double scale = step.next.scale();
    const double half = 1.0 / std::fabs(scale);
    const double cond = std::fabs(scale) * static_cast<double>(step.next.iterates()) *
                        std::numeric_limits<double>::epsilon();
    if (half < tol.conditioning || cond > tol.renorm) {
      tower.truncate("conditioning at level " + std::to_string(k));
      break;
    }
    const double p_base = det->fixed_endpoint / current.scale();
    RenormLevel level{k,
                      det->n,
                      step.next.iterates(),
                      det->restricted_interval(),
                      det->fixed_endpoint,
                      step.alpha_slope,
                      det->orientation,
                      det->shuffle,
                      step.next,
                      step.c1,
                      step.boundary,
                      0.0};
    level.periodic_residual = std::fabs(iterate(*base, p_base, level.m) - p_base);
    current = step.next;
    tower.push(std::move(level), p_base);
  }
  return tower;
}

}  // namespace renormlab
