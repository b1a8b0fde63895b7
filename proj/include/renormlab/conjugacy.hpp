#pragma once

// The conjugacy H between two maps of the same bounded combinatorics,
// realized on matched partition landmarks and cylinder endpoints, and its
// empirical quasisymmetry profile.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "renormlab/core.hpp"
#include "renormlab/markov.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/rootfind.hpp"

namespace renormlab {

struct MatchCertificate {
  int depth = 0;
};

/// Checks return times and shuffle permutations level by level.
inline MatchCertificate match_towers(const RenormTower& f, const RenormTower& g, int depth = 0) {
  const int common = std::min(f.depth(), g.depth());
  if (depth <= 0) depth = common;
  if (depth > common)
    throw ParameterError("requested match depth " + std::to_string(depth) +
                         " exceeds the towers' common depth " + std::to_string(common));
  for (int k = 1; k <= depth; ++k) {
    const auto& a = f.level(k);
    const auto& b = g.level(k);
    if (a.n != b.n)
      throw CombinatoricsMismatchError("return times differ at level " + std::to_string(k) + " (" +
                                           std::to_string(a.n) + " vs " + std::to_string(b.n) + ")",
                                       k);
    if (a.shuffle != b.shuffle)
      throw CombinatoricsMismatchError("shuffle permutations differ at level " + std::to_string(k),
                                       k);
  }
  return {depth};
}

struct MeshPoint {
  double x;  ///< source coordinate
  double y;  ///< H(x)
};

/// H on landmarks, with linear interpolation in between.
class ConjugacyMesh {
 public:
  ConjugacyMesh() = default;

  /// Sorts, merges coincident landmarks and checks monotonicity.
  static ConjugacyMesh from_pairs(std::vector<MeshPoint> pts, std::vector<Interval> unresolved_src = {},
                                  std::vector<Interval> unresolved_dst = {}, int word_length = 0) {
    std::sort(pts.begin(), pts.end(),
              [](const MeshPoint& a, const MeshPoint& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    ConjugacyMesh m;
    for (const auto& p : pts) {
      if (!m.pts_.empty() && p.x - m.pts_.back().x <= 1e-14) continue;
      if (!m.pts_.empty() && !(p.y > m.pts_.back().y))
        throw Error("order-violation", "landmark pairing is not order preserving near x = " +
                                           std::to_string(p.x));
      m.pts_.push_back(p);
    }
    if (m.pts_.size() < 2) throw ParameterError("a mesh needs at least two landmarks");
    auto by_lo = [](const Interval& a, const Interval& b) { return a.lo < b.lo; };
    std::sort(unresolved_src.begin(), unresolved_src.end(), by_lo);
    std::sort(unresolved_dst.begin(), unresolved_dst.end(), by_lo);
    m.unresolved_src_ = std::move(unresolved_src);
    m.unresolved_dst_ = std::move(unresolved_dst);
    m.word_length_ = word_length;
    m.width_ = 0.0;
    for (std::size_t i = 0; i + 1 < m.pts_.size(); ++i) {
      const double mid = 0.5 * (m.pts_[i].x + m.pts_[i + 1].x);
      if (!m.in_unresolved(mid)) m.width_ = std::max(m.width_, m.pts_[i + 1].x - m.pts_[i].x);
    }
    return m;
  }

  const std::vector<MeshPoint>& points() const { return pts_; }
  const std::vector<Interval>& unresolved() const { return unresolved_src_; }
  const std::vector<Interval>& unresolved_image() const { return unresolved_dst_; }
  /// Largest gap between consecutive landmarks outside the unresolved set.
  double width() const { return width_; }
  int word_length() const { return word_length_; }
  Interval domain() const { return {pts_.front().x, pts_.back().x}; }

  ConjugacyMesh inverse() const {
    std::vector<MeshPoint> swapped;
    swapped.reserve(pts_.size());
    for (const auto& p : pts_) swapped.push_back({p.y, p.x});
    return from_pairs(std::move(swapped), unresolved_dst_, unresolved_src_, word_length_);
  }

  bool in_unresolved(double x) const {
    for (const auto& iv : unresolved_src_)
      if (iv.interior_contains(x)) return true;
    return false;
  }
  /// True when [a, b] meets the interior of an unresolved interval.
  bool touches_unresolved(const Interval& iv) const {
    for (const auto& u : unresolved_src_)
      if (u.overlap(iv) > 0.0) return true;
    return false;
  }
  /// Length of the landmark gap containing x (0 at a landmark).
  double local_width(double x) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), x,
                               [](const MeshPoint& p, double v) { return p.x < v; });
    if (it == pts_.end() || it == pts_.begin() || it->x == x) return 0.0;
    return it->x - (it - 1)->x;
  }
  double unresolved_measure() const {
    double s = 0.0;
    for (const auto& u : unresolved_src_) s += u.length();
    return s;
  }

 private:
  std::vector<MeshPoint> pts_;
  std::vector<Interval> unresolved_src_;
  std::vector<Interval> unresolved_dst_;
  double width_ = 0.0;
  int word_length_ = 0;
};

namespace detail {

/// The point of [-1, 0] (side < 0) or [0, 1] (side > 0) mapped to y.
inline double branch_preimage(const UnimodalMap& f, double y, int side, int budget) {
  auto fn = [&](double x) { return f(x) - y; };
  return side < 0 ? bisect(fn, -1.0, 0.0, budget) : bisect(fn, 0.0, 1.0, budget);
}

}  // namespace detail

/// Matches landmarks of two partitions of equal depth by identical index
/// sequences: element endpoints, I_K and cylinder endpoints of every
/// admissible word of length <= L. I_K is the unresolved core.
/// Each round of `preimage_rounds` adds the pairs (f^-1(x), g^-1(y)) on
/// matching branches for every pair (x, y) below both critical values.
inline ConjugacyMesh build_mesh(const MarkovPartition& pf, const MarkovPartition& pg, int word_length,
                                int preimage_rounds = 1) {
  if (word_length < 1) throw ParameterError("word length must be at least 1");
  if (preimage_rounds < 0) throw ParameterError("preimage rounds must be non-negative");
  if (pf.depth() != pg.depth())
    throw ParameterError("partitions have different depths");
  if (pf.elements().size() != pg.elements().size())
    throw AdmissibilityTransferError("partitions have different element counts");
  for (std::size_t i = 0; i < pf.elements().size(); ++i) {
    const auto& a = pf.element(i);
    const auto& b = pg.element(i);
    if (a.level != b.level || a.index != b.index)
      throw AdmissibilityTransferError("element lists differ at element " + std::to_string(i));
  }
  const auto wf = admissible_words(pf, word_length);
  const auto wg = admissible_words(pg, word_length);
  const std::size_t common = std::min(wf.size(), wg.size());
  for (std::size_t i = 0; i < common; ++i)
    if (wf[i].ids != wg[i].ids) {
      const auto& first = wf[i].ids < wg[i].ids ? wf[i] : wg[i];
      throw AdmissibilityTransferError("word " + word_label(pf, first.ids) +
                                       " is admissible for one map only");
    }
  if (wf.size() != wg.size()) {
    const auto& extra = wf.size() > wg.size() ? wf[common] : wg[common];
    throw AdmissibilityTransferError("word " + word_label(pf, extra.ids) +
                                     " is admissible for one map only");
  }

  std::vector<MeshPoint> pts{{-1.0, -1.0}, {1.0, 1.0}, {pf.core().lo, pg.core().lo},
                             {pf.core().hi, pg.core().hi}};
  for (std::size_t i = 0; i < pf.elements().size(); ++i) {
    pts.push_back({pf.element(i).interval.lo, pg.element(i).interval.lo});
    pts.push_back({pf.element(i).interval.hi, pg.element(i).interval.hi});
  }
  for (std::size_t i = 0; i < wf.size(); ++i) {
    pts.push_back({wf[i].cylinder.lo, wg[i].cylinder.lo});
    pts.push_back({wf[i].cylinder.hi, wg[i].cylinder.hi});
  }
  const UnimodalMap& f = pf.base();
  const UnimodalMap& g = pg.base();
  const int budget = pf.tolerances().bisection_budget;
  std::vector<MeshPoint> layer = pts;
  for (int r = 0; r < preimage_rounds; ++r) {
    std::vector<MeshPoint> next;
    for (const auto& q : layer) {
      if (q.x > f.critical_value() || q.y > g.critical_value()) continue;
      for (int side : {-1, 1})
        next.push_back({detail::branch_preimage(f, q.x, side, budget),
                        detail::branch_preimage(g, q.y, side, budget)});
    }
    pts.insert(pts.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return ConjugacyMesh::from_pairs(std::move(pts), {pf.core()}, {pg.core()}, word_length);
}

struct ConjugacyValue {
  double value;
  bool unresolved;
};

/// H(x): the partner of a landmark, or the linear interpolant between the
/// neighbouring landmarks.
inline ConjugacyValue conjugacy_at(const ConjugacyMesh& mesh, double x) {
  const auto& pts = mesh.points();
  if (x <= pts.front().x) return {pts.front().y, false};
  if (x >= pts.back().x) return {pts.back().y, false};
  auto it = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const MeshPoint& p, double v) { return p.x < v; });
  if (it->x == x) return {it->y, false};
  const MeshPoint& hi = *it;
  const MeshPoint& lo = *(it - 1);
  const double w = (x - lo.x) / (hi.x - lo.x);
  return {lo.y + w * (hi.y - lo.y), mesh.in_unresolved(0.5 * (lo.x + hi.x))};
}

struct QsRow {
  int j = 0;
  double tau = 0.0;
  double max_rho = 0.0;
  double mean_rho = 0.0;
  int samples = 0;
  int excluded = 0;
  bool resolved = true;  ///< tau >= 2 * mesh width
};

struct QsModulusTable {
  std::vector<QsRow> rows;
  double mesh_width = 0.0;
  double excluded_measure = 0.0;
  std::vector<std::string> warnings;

  double max_rho() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.max_rho);
    return m;
  }
};

/// rho(x, tau) = |H(x+tau) - H(x)| / |H(x) - H(x-tau)| over a grid of x at
/// dyadic scales tau = 2^-j, skipping triples that meet unresolved intervals.
inline QsModulusTable qs_modulus(const ConjugacyMesh& mesh, int j0, int j1, int grid) {
  if (j0 < 0 || j1 < j0) throw ParameterError("scale range must satisfy 0 <= j0 <= j1");
  if (grid < 2) throw ParameterError("qs grid needs at least two points");
  QsModulusTable table;
  table.mesh_width = mesh.width();
  table.excluded_measure = mesh.unresolved_measure();
  const Interval dom = mesh.domain();
  for (int j = j0; j <= j1; ++j) {
    QsRow row;
    row.j = j;
    row.tau = std::ldexp(1.0, -j);
    row.resolved = row.tau >= 2.0 * mesh.width();
    if (!row.resolved)
      table.warnings.push_back("scale j=" + std::to_string(j) + " is below twice the mesh width");
    const double first = dom.lo + row.tau;
    const double last = dom.hi - row.tau;
    double sum = 0.0;
    if (last >= first) {
      for (int i = 0; i < grid; ++i) {
        const double x = first + (last - first) * i / (grid - 1);
        if (mesh.touches_unresolved({x - row.tau, x + row.tau})) {
          ++row.excluded;
          continue;
        }
        const double hm = conjugacy_at(mesh, x - row.tau).value;
        const double h0 = conjugacy_at(mesh, x).value;
        const double hp = conjugacy_at(mesh, x + row.tau).value;
        const double rho = std::fabs(hp - h0) / std::fabs(h0 - hm);
        row.max_rho = std::max(row.max_rho, rho);
        sum += rho;
        ++row.samples;
      }
    }
    row.mean_rho = row.samples > 0 ? sum / row.samples : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace renormlab
