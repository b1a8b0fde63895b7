#pragma once

// The partition of [-1,1] into the pieces M_{k,i} of I_{k-1} \ I_k cut at the
// orbit of p_k, the induced map F = f^{m_{k-1}} on level-k pieces, its
// inverse branches and the admissible words they compose into.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "renormlab/core.hpp"
#include "renormlab/map.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/rootfind.hpp"

namespace renormlab {

enum class ElementKind { GapOnly, CyclePlusGap };

inline const char* to_string(ElementKind k) {
  return k == ElementKind::GapOnly ? "gap" : "cycle+gap";
}

struct PartitionElement {
  int level = 0;   ///< k >= 1
  int index = 0;   ///< 1-based, left to right within the level
  Interval interval;
  long iterate = 1;  ///< m_{k-1}: F = f^iterate on this element
  ElementKind kind = ElementKind::GapOnly;
};

/// Cycle intervals I_{k,j} = (f^{m_{k-1}})^j(I_k), j = 0..n_k, and the gaps
/// they leave in I_{k-1}.
struct LevelGaps {
  int level = 0;
  std::vector<Interval> cycle;
  std::vector<Interval> gaps;
};

inline LevelGaps level_gaps(const RenormTower& tower, int k, const Tolerances& tol = {}) {
  if (k < 1 || k > tower.depth())
    throw ParameterError("level " + std::to_string(k) + " outside the tower");
  LevelGaps out;
  out.level = k;
  const long step = tower.period(k - 1);
  Interval cur = tower.nested(k);
  out.cycle.push_back(cur);
  for (int j = 1; j <= tower.level(k).n; ++j) {
    cur = interval_image(tower.base(), cur, step);
    if (std::fabs(cur.lo) > 1.0 + tol.domain || std::fabs(cur.hi) > 1.0 + tol.domain)
      throw EscapeError("cycle interval left [-1,1]");
    out.cycle.push_back(cur);
  }
  std::vector<Interval> sorted = out.cycle;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  const Interval outer = tower.nested(k - 1);
  double cursor = outer.lo;
  for (const auto& iv : sorted) {
    if (iv.lo - cursor > tol.renorm) out.gaps.push_back({cursor, std::min(iv.lo, outer.hi)});
    cursor = std::max(cursor, iv.hi);
  }
  if (outer.hi - cursor > tol.renorm) out.gaps.push_back({cursor, outer.hi});
  return out;
}

class MarkovPartition;

struct BranchWord {
  std::vector<std::size_t> ids;  ///< element ids i_0 .. i_{l-1}
  Interval cylinder;             ///< g_{i_0} o ... o g_{i_{l-2}}(M_{i_{l-1}})
  Interval domain;               ///< F(M_{i_{l-1}}), the domain of g_w

  std::size_t length() const { return ids.size(); }
};

class MarkovPartition {
 public:
  MarkovPartition(RenormTower tower, int depth, std::vector<PartitionElement> elements,
                  std::vector<std::vector<double>> cuts, std::vector<LevelGaps> gaps,
                  const Tolerances& tol)
      : tower_(std::move(tower)),
        depth_(depth),
        elements_(std::move(elements)),
        cuts_(std::move(cuts)),
        gaps_(std::move(gaps)),
        tol_(tol) {
    for (const auto& e : elements_) {
      images_.push_back(Interval::hull(apply(e, e.interval.lo), apply(e, e.interval.hi)));
    }
    successors_.resize(elements_.size());
    for (std::size_t i = 0; i < elements_.size(); ++i)
      for (std::size_t j = 0; j < elements_.size(); ++j)
        if (images_[i].contains(elements_[j].interval, tol_.markov)) successors_[i].push_back(j);
  }

  const RenormTower& tower() const { return tower_; }
  const UnimodalMap& base() const { return tower_.base(); }
  int depth() const { return depth_; }
  const Tolerances& tolerances() const { return tol_; }
  const std::vector<PartitionElement>& elements() const { return elements_; }
  const PartitionElement& element(std::size_t id) const { return elements_.at(id); }
  /// O(p_k) intersected with I_{k-1}.
  const std::vector<double>& cut_points(int k) const { return cuts_.at(static_cast<std::size_t>(k - 1)); }
  const LevelGaps& gaps(int k) const { return gaps_.at(static_cast<std::size_t>(k - 1)); }
  /// F(M) for element `id`.
  const Interval& image(std::size_t id) const { return images_.at(id); }
  const std::vector<std::size_t>& successors(std::size_t id) const { return successors_.at(id); }
  /// I_K, the part of [-1,1] the partition leaves unresolved.
  const Interval& core() const { return tower_.nested(depth_); }

  std::size_t id_of(int level, int index) const {
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (elements_[i].level == level && elements_[i].index == index) return i;
    throw OutOfRangeError("no element (" + std::to_string(level) + "," + std::to_string(index) + ")");
  }
  std::vector<std::size_t> level_ids(int k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (elements_[i].level == k) out.push_back(i);
    return out;
  }

  /// F on element `id` (no membership check).
  double apply(std::size_t id, double x) const { return apply(elements_.at(id), x); }

  /// Value, derivative and nonlinearity of F = f^m on element `id` at x.
  Jet jet(std::size_t id, double x, double critical_radius = 0.0) const {
    return iterate_jet(base(), x, elements_.at(id).iterate, critical_radius);
  }

  /// Partition landmarks: +-1, every element endpoint and the I_K endpoints.
  std::vector<double> landmarks() const {
    std::vector<double> out{-1.0, 1.0, core().lo, core().hi};
    for (const auto& e : elements_) {
      out.push_back(e.interval.lo);
      out.push_back(e.interval.hi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  double apply(const PartitionElement& e, double x) const { return iterate(base(), x, e.iterate); }

  RenormTower tower_;
  int depth_;
  std::vector<PartitionElement> elements_;
  std::vector<std::vector<double>> cuts_;
  std::vector<LevelGaps> gaps_;
  Tolerances tol_;
  std::vector<Interval> images_;
  std::vector<std::vector<std::size_t>> successors_;
};

/// Partition of [-1,1] \ I_K by the pieces of I_{k-1} \ I_k cut at O(p_k).
inline MarkovPartition build_partition(const RenormTower& tower, int depth,
                                       const Tolerances& tol = {}) {
  if (depth < 1 || depth > tower.depth())
    throw ParameterError("partition depth " + std::to_string(depth) + " exceeds tower depth " +
                         std::to_string(tower.depth()));
  std::vector<PartitionElement> elements;
  std::vector<std::vector<double>> cuts;
  std::vector<LevelGaps> gaps;
  const UnimodalMap& f = tower.base();
  for (int k = 1; k <= depth; ++k) {
    const Interval outer = tower.nested(k - 1);
    const Interval inner = tower.nested(k);
    const auto orb = orbit(f, tower.periodic_endpoint(k), static_cast<int>(tower.period(k) - 1),
                           tol.domain);
    std::vector<double> level_cuts;
    for (double x : orb)
      if (outer.contains(x, tol.renorm)) level_cuts.push_back(x);
    std::sort(level_cuts.begin(), level_cuts.end());
    level_cuts.erase(std::unique(level_cuts.begin(), level_cuts.end(),
                                 [&](double a, double b) { return b - a <= tol.renorm; }),
                     level_cuts.end());

    LevelGaps lg = level_gaps(tower, k, tol);
    int index = 0;
    for (const Interval piece : {Interval{outer.lo, inner.lo}, Interval{inner.hi, outer.hi}}) {
      std::vector<double> bounds{piece.lo};
      for (double x : level_cuts)
        if (x > piece.lo + tol.renorm && x < piece.hi - tol.renorm) bounds.push_back(x);
      bounds.push_back(piece.hi);
      for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const Interval iv{bounds[b], bounds[b + 1]};
        if (iv.length() < tol.conditioning)
          throw DegenerateComponentError("component of length " + std::to_string(iv.length()) +
                                         " at level " + std::to_string(k));
        ElementKind kind = ElementKind::GapOnly;
        for (std::size_t j = 1; j < lg.cycle.size(); ++j)
          if (iv.overlap(lg.cycle[j]) > tol.renorm) kind = ElementKind::CyclePlusGap;
        elements.push_back({k, ++index, iv, tower.period(k - 1), kind});
      }
    }
    cuts.push_back(std::move(level_cuts));
    gaps.push_back(std::move(lg));
  }
  return MarkovPartition(tower, depth, std::move(elements), std::move(cuts), std::move(gaps), tol);
}

struct InducedValue {
  double value;
  std::size_t element;
};

/// F(x) together with the element containing x in its open interior.
inline InducedValue induced_eval(const MarkovPartition& part, double x) {
  const auto& tol = part.tolerances();
  if (part.core().contains(x))
    throw UnresolvedPointError("point " + std::to_string(x) + " lies in the unresolved core I_K");
  for (std::size_t id = 0; id < part.elements().size(); ++id) {
    const Interval& iv = part.element(id).interval;
    if (x > iv.lo + tol.conditioning && x < iv.hi - tol.conditioning)
      return {part.apply(id, x), id};
  }
  throw UnresolvedPointError("point " + std::to_string(x) + " is a cut point or outside [-1,1]");
}

/// g(y) = (F|M)^{-1}(y) for element `id`.
inline double branch_inverse(const MarkovPartition& part, std::size_t id, double y) {
  const auto& tol = part.tolerances();
  const Interval& img = part.image(id);
  if (!img.contains(y, tol.markov))
    throw OutOfRangeError("value " + std::to_string(y) + " outside the branch range");
  const Interval& iv = part.element(id).interval;
  const double fa = part.apply(id, iv.lo);
  const double fb = part.apply(id, iv.hi);
  if (y == fa) return iv.lo;
  if (y == fb) return iv.hi;
  // Clamp tolerance-level overshoot onto the nearer endpoint.
  if (!img.interior_contains(y)) return std::fabs(y - fa) < std::fabs(y - fb) ? iv.lo : iv.hi;
  const auto phi = [&](double x) {
    const Jet j = part.jet(id, x);
    return std::pair{j.value - y, j.derivative};
  };
  return safeguarded_newton(phi, iv.lo, iv.hi, tol.bisection_budget);
}

/// g_{i_0} o ... o g_{i_{l-1}} applied to y.
inline double branch_chain(const MarkovPartition& part, const std::vector<std::size_t>& ids,
                           double y) {
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) y = branch_inverse(part, *it, y);
  return y;
}

/// "(k,i)(k,i)..." label of a word.
inline std::string word_label(const MarkovPartition& part, const std::vector<std::size_t>& ids) {
  std::string out;
  for (auto id : ids) {
    const auto& e = part.element(id);
    out += "(" + std::to_string(e.level) + "," + std::to_string(e.index) + ")";
  }
  return out;
}

namespace detail {

inline Interval pull_back(const MarkovPartition& part, const std::vector<std::size_t>& prefix,
                          Interval iv) {
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    iv = Interval::hull(branch_inverse(part, *it, iv.lo), branch_inverse(part, *it, iv.hi));
  return iv;
}

}  // namespace detail

/// All admissible words of length 1..max_length in lexicographic order of
/// their element ids (a word precedes its extensions).
inline std::vector<BranchWord> admissible_words(const MarkovPartition& part, int max_length) {
  if (max_length < 1) throw ParameterError("word length must be at least 1");
  std::vector<BranchWord> out;
  std::vector<std::size_t> ids;
  auto visit = [&](auto&& self, std::size_t id) -> void {
    ids.push_back(id);
    std::vector<std::size_t> prefix(ids.begin(), ids.end() - 1);
    BranchWord w;
    w.ids = ids;
    w.cylinder = detail::pull_back(part, prefix, part.element(id).interval);
    w.domain = part.image(id);
    out.push_back(std::move(w));
    if (static_cast<int>(ids.size()) < max_length)
      for (std::size_t next : part.successors(id)) self(self, next);
    ids.pop_back();
  };
  for (std::size_t id = 0; id < part.elements().size(); ++id) visit(visit, id);
  return out;
}

/// Largest distance from an endpoint of some F(M) to the nearest landmark.
inline double markov_alignment_error(const MarkovPartition& part) {
  const auto marks = part.landmarks();
  double worst = 0.0;
  for (std::size_t id = 0; id < part.elements().size(); ++id) {
    for (double y : {part.image(id).lo, part.image(id).hi}) {
      auto it = std::lower_bound(marks.begin(), marks.end(), y);
      double best = std::numeric_limits<double>::infinity();
      if (it != marks.end()) best = std::min(best, std::fabs(*it - y));
      if (it != marks.begin()) best = std::min(best, std::fabs(*(it - 1) - y));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace renormlab
