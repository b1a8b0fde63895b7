#pragma once

// Parameter tuning in the affine family f_c(x) = c - (1+c)|x|^t: locate the
// superstable parameters of a prescribed combinatorial type by nested
// bisection, and extrapolate constant-type cascades to their accumulation
// point.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "renormlab/core.hpp"
#include "renormlab/map.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/rootfind.hpp"

namespace renormlab {

struct TuneResult {
  double c = 0.0;
  std::vector<double> superstable;  ///< c_1 .. c_K (and any extra anchors used)
  bool extrapolated = false;
};

namespace detail {

inline double critical_iterate(double t, double c, long m) {
  // Direct affine-family arithmetic: cheaper than building a map per probe.
  double x = 0.0;
  for (long i = 0; i < m; ++i) x = c - (1.0 + c) * abs_pow(x, t);
  return x;
}

/// True when f_c renormalizes `target.size()` times with exactly these
/// return times (a boundary last level counts).
inline bool has_type(double t, double c, std::span<const int> target, const Tolerances& tol,
                     bool require_interior = false) {
  if (!(c > 0.0 && c <= 1.0)) return false;
  const int max_n = *std::max_element(target.begin(), target.end());
  try {
    const auto tower =
        build_tower(make_affine_family(t, c, tol), static_cast<int>(target.size()), max_n, tol);
    if (tower.depth() != static_cast<int>(target.size())) return false;
    for (const auto& lvl : tower.levels()) {
      if (lvl.n != target[static_cast<std::size_t>(lvl.k - 1)]) return false;
      if (require_interior && lvl.boundary) return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Largest root of c -> f_c^{m_k}(0) inside (lo, hi) whose critical orbit has
/// exact period m_k.
inline std::optional<double> largest_superstable(double t, double lo, double hi, long m_prev,
                                                 int n, int cells) {
  const long m = m_prev * n;
  const auto g = [&](double c) { return critical_iterate(t, c, m); };
  // Scan the open window only: the left end is the previous anchor, itself a root.
  const double a = lo + (hi - lo) / cells;
  const double b = hi - (hi - lo) / cells;
  auto brackets = sign_changes(g, a, b, cells);
  for (auto it = brackets.rbegin(); it != brackets.rend(); ++it) {
    const double c = it->lo == it->hi ? it->lo : bisect(g, it->lo, it->hi, 400);
    bool exact = true;
    for (int d = 1; d < n && exact; ++d)
      if (n % d == 0 && std::fabs(critical_iterate(t, c, m_prev * d)) < 1e-8) exact = false;
    if (exact) return c;
  }
  return std::nullopt;
}

}  // namespace detail

/// Superstable parameters c_1..c_K for the return-time sequence `target`:
/// c_k is the parameter where the (k-1)-th renormalization sits at its
/// primary superstable parameter of period n_k.
inline std::vector<double> superstable_sequence(double t, std::span<const int> target,
                                                const Tolerances& tol = {}, int cells = 4000) {
  std::vector<double> anchors;
  double lo = 0.0;
  double hi = 1.0;
  long m_prev = 1;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] < 2) throw ParameterError("return times must be at least 2");
    if (k > 0) {
      // Upper edge of the window where the first k return times are realized.
      const auto prefix = target.first(k);
      double in = anchors.back();
      double out = hi;
      if (detail::has_type(t, out, prefix, tol))
        throw TuningError("cannot bracket the renormalization window", static_cast<int>(k));
      while (out - in > 1e-13 * std::max(1.0, std::fabs(in))) {
        const double mid = 0.5 * (in + out);
        if (mid == in || mid == out) break;
        (detail::has_type(t, mid, prefix, tol) ? in : out) = mid;
      }
      lo = anchors.back();
      hi = in;
    }
    auto c = detail::largest_superstable(t, lo, hi, m_prev, target[k], cells);
    if (!c) throw TuningError("no superstable parameter at level " + std::to_string(k + 1),
                              static_cast<int>(k));
    anchors.push_back(*c);
    m_prev *= target[k];
  }
  return anchors;
}

/// A parameter realizing the target return times. Constant types of depth
/// >= 3 are extrapolated (Aitken) from the last three superstable anchors
/// toward the accumulation point; shorter or mixed targets return the deepest
/// superstable parameter.
inline TuneResult tune_parameter(double t, std::span<const int> target,
                                 const Tolerances& tol = {}) {
  if (!(t > 1.0)) throw ParameterError("critical exponent t must exceed 1");
  if (target.empty()) throw ParameterError("target must contain at least one return time");
  const auto k_target = target.size();
  const bool constant = std::all_of(target.begin(), target.end(),
                                    [&](int n) { return n == target.front(); });
  TuneResult out;
  if (!constant || k_target < 3) {
    out.superstable = superstable_sequence(t, target, tol);
    out.c = out.superstable.back();
    return out;
  }
  constexpr std::size_t kExtraAnchors = 3;
  std::vector<int> extended(target.begin(), target.end());
  for (std::size_t extra = 0; extra <= kExtraAnchors; ++extra) {
    out.superstable = superstable_sequence(t, extended, tol);
    const auto& s = out.superstable;
    const std::size_t last = s.size() - 1;
    const double d1 = s[last - 1] - s[last - 2];
    const double d2 = s[last] - s[last - 1];
    const double denom = d2 - d1;
    if (denom != 0.0) {
      const double c = s[last] - d2 * d2 / denom;
      if (detail::has_type(t, c, target, tol, true)) {
        out.c = c;
        out.extrapolated = true;
        return out;
      }
    }
    extended.push_back(target.front());
  }
  out.superstable.resize(k_target);
  out.c = out.superstable.back();
  return out;
}

inline TuneResult tune_parameter(double t, std::initializer_list<int> target,
                                 const Tolerances& tol = {}) {
  const std::vector<int> v(target);
  return tune_parameter(t, std::span<const int>(v), tol);
}

}  // namespace renormlab
