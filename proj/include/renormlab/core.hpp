#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace renormlab {

/// Numerical tolerances shared by every module. Defaults are the documented
/// ones; the CLI lets a config file override any of them.
struct Tolerances {
  double domain = 1e-9;       ///< slack on [-1,1] before a point counts as outside
  double derivative = 1e-12;  ///< |h'| below this is degenerate
  double renorm = 1e-9;       ///< containment / disjointness / normalization
  double conditioning = 1e-12;
  double markov = 1e-7;       ///< landmark alignment of F-images
  double root = 1e-9;         ///< residual accepted from the periodic-point solver
  double critical = 1e-4;     ///< exclusion radius around the critical point
  int bisection_budget = 200;
};

// Error taxonomy. Every error carries a stable kebab-case code that the CLI
// reports verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& m) : Error("parameter-out-of-range", m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};
struct EscapeError : Error {
  explicit EscapeError(const std::string& m) : Error("escape", m) {}
};
struct DegenerateDerivativeError : Error {
  explicit DegenerateDerivativeError(const std::string& m) : Error("degenerate-derivative", m) {}
};
struct CriticalProximityError : Error {
  explicit CriticalProximityError(const std::string& m) : Error("critical-proximity", m) {}
};
struct NoSignChangeError : Error {
  explicit NoSignChangeError(const std::string& m) : Error("no-sign-change", m) {}
};
struct NonConvergenceError : Error {
  NonConvergenceError(const std::string& m, double residual)
      : Error("non-convergence", m), residual(residual) {}
  double residual;
};
struct NormalizationError : Error {
  explicit NormalizationError(const std::string& m) : Error("normalization-failure", m) {}
};
struct NotRenormalizableError : Error {
  explicit NotRenormalizableError(int level)
      : Error("not-renormalizable-at-level",
              "not-renormalizable-at-level " + std::to_string(level)),
        level(level) {}
  int level;
};
struct TuningError : Error {
  TuningError(const std::string& m, int deepest) : Error("tuning-failure", m), deepest_level(deepest) {}
  int deepest_level;
};
struct DegenerateComponentError : Error {
  explicit DegenerateComponentError(const std::string& m) : Error("degenerate-component", m) {}
};
struct UnresolvedPointError : Error {
  explicit UnresolvedPointError(const std::string& m) : Error("unresolved-point", m) {}
};
struct OutOfRangeError : Error {
  explicit OutOfRangeError(const std::string& m) : Error("out-of-range", m) {}
};
struct CombinatoricsMismatchError : Error {
  CombinatoricsMismatchError(const std::string& m, int level)
      : Error("combinatorics-mismatch", m), level(level) {}
  int level;
};
struct AdmissibilityTransferError : Error {
  explicit AdmissibilityTransferError(const std::string& m) : Error("admissibility-transfer", m) {}
};

/// Closed interval [lo, hi] with lo <= hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval hull(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  bool contains(const Interval& o, double tol = 0.0) const {
    return o.lo >= lo - tol && o.hi <= hi + tol;
  }
  bool interior_contains(double x) const { return x > lo && x < hi; }
  /// Length of the intersection, zero when disjoint.
  double overlap(const Interval& o) const {
    return std::max(0.0, std::min(hi, o.hi) - std::max(lo, o.lo));
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

namespace detail {

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// |x|^p with an exact multiplication path for small integral exponents.
inline double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (a == 0.0) return p == 0.0 ? 1.0 : 0.0;
  const double r = std::round(p);
  if (r == p && r >= 0.0 && r <= 16.0) {
    double out = 1.0;
    for (int i = 0; i < static_cast<int>(r); ++i) out *= a;
    return out;
  }
  return std::pow(a, p);
}

}  // namespace detail
}  // namespace renormlab
