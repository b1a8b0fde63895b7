#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "renormlab/core.hpp"

namespace renormlab {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection to machine resolution (or the iteration budget). The function
/// must change sign on [a, b]; an exact zero at either end is returned as is.
template <class Fn>
double bisect(const Fn& fn, double a, double b, int budget = 200) {
  double fa = fn(a);
  if (fa == 0.0) return a;
  const double fb = fn(b);
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0))
    throw NoSignChangeError("no sign change on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  for (int i = 0; i < budget; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Newton iteration kept inside a sign-change bracket; falls back to a
/// bisection step whenever the Newton step leaves the bracket or stalls.
/// `fn(x)` returns {value, derivative}.
template <class Fn>
double safeguarded_newton(const Fn& fn, double a, double b, int budget = 200) {
  const double fa = fn(a).first;
  if (fa == 0.0) return a;
  const double fb = fn(b).first;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0))
    throw NoSignChangeError("no sign change on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
  const bool neg_at_a = fa < 0.0;
  double x = a - fa * (b - a) / (fb - fa);  // secant start
  if (!(x > a && x < b)) x = 0.5 * (a + b);
  for (int i = 0; i < budget; ++i) {
    const auto [fx, dx] = fn(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == neg_at_a) a = x; else b = x;
    const double m = 0.5 * (a + b);
    if (m == a || m == b) return x;
    double next = (dx != 0.0 && std::isfinite(dx)) ? x - fx / dx : m;
    if (!(next > a && next < b)) next = m;
    if (std::fabs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(x))
      return next;
    x = next;
  }
  return x;
}

/// Brackets of sign changes of fn on an equispaced grid of `cells` cells
/// over [a, b]. Exact zeros at grid nodes become degenerate brackets.
template <class Fn>
std::vector<Bracket> sign_changes(const Fn& fn, double a, double b, int cells) {
  std::vector<Bracket> out;
  double x0 = a;
  double f0 = fn(x0);
  if (f0 == 0.0) out.push_back({x0, x0});
  for (int i = 1; i <= cells; ++i) {
    const double x1 = (i == cells) ? b : a + (b - a) * static_cast<double>(i) / cells;
    const double f1 = fn(x1);
    if (f1 == 0.0) {
      out.push_back({x1, x1});
    } else if (f0 != 0.0 && ((f0 < 0.0) != (f1 < 0.0))) {
      out.push_back({x0, x1});
    }
    x0 = x1;
    f0 = f1;
  }
  return out;
}

}  // namespace renormlab
