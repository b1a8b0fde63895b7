#pragma once

// Empirical counterparts of the geometric constants attached to a tower
// (return geometry, scaling ratios, critical values, nonlinearity of the
// renormalized factors) and of the bounded distortion property of the
// induced Markov map.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/core.hpp"
#include "renormlab/markov.hpp"
#include "renormlab/renorm.hpp"

namespace renormlab {

struct LemmaQuantities {
  int k = 0;
  double c1 = 0.0;      ///< c_1(f_k) = f_k(0)
  double nl_sup = 0.0;  ///< sup |N(h_k)| on the sample grid of [-1,0]
  std::optional<double> scaling;  ///< |I_k| / |I_{k-1}|, k >= 1
  double critical_iterate = 0.0;  ///< c_{m_k} = f^{m_k}(0)
  Interval L;                     ///< f^{m_k}(I_k)
  // Available when p_{k+1} is known (k < depth).
  std::optional<Interval> T;  ///< between p_k and p_{k+1}
  std::optional<Interval> M;  ///< between p_{k+1} and c_{m_k}
  std::optional<double> return_ratio;  ///< |M_k| / |I_k|
};

inline double nonlinearity_sup(const RescaledIterate& fk, int samples = 512, double margin = 1e-4) {
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double y = -1.0 + margin + (1.0 - 2.0 * margin) * i / (samples - 1);
    sup = std::max(sup, std::fabs(fk.factor_nonlinearity(y)));
  }
  return sup;
}

/// Per-level quantities for k = 0..depth. p_0 = -1, the fixed endpoint of I_0.
inline std::vector<LemmaQuantities> lemma_quantities(const RenormTower& tower,
                                                     int samples = 512) {
  std::vector<LemmaQuantities> out;
  const UnimodalMap& f = tower.base();
  for (int k = 0; k <= tower.depth(); ++k) {
    LemmaQuantities q;
    q.k = k;
    const RescaledIterate fk = tower.map_at(k);
    q.c1 = fk.critical_value();
    q.nl_sup = nonlinearity_sup(fk, samples);
    if (k >= 1) q.scaling = tower.nested(k).length() / tower.nested(k - 1).length();
    const long m = tower.period(k);
    q.critical_iterate = iterate(f, 0.0, m);
    const double pk = k == 0 ? -1.0 : tower.periodic_endpoint(k);
    q.L = Interval::hull(pk, q.critical_iterate);
    if (k < tower.depth()) {
      const double next = tower.periodic_endpoint(k + 1);
      q.T = Interval::hull(pk, next);
      q.M = Interval::hull(next, q.critical_iterate);
      q.return_ratio = q.M->length() / tower.nested(k).length();
    }
    out.push_back(q);
  }
  return out;
}

inline std::vector<LemmaQuantities> lemma_quantities(const RenormTower& tower,
                                                     const MarkovPartition&, int samples = 512) {
  return lemma_quantities(tower, samples);
}

/// g_w(x), g_w'(x) and N(g_w)(x) along a word.
struct BranchJet {
  double value = 0.0;
  double derivative = 1.0;
  double nonlinearity = 0.0;
};

/// Pulls x back through g_{i_{l-1}}, ..., g_{i_0}, accumulating
/// N(g)(y) = -N(F)(g(y)) g'(y) and the composition rule for N.
inline BranchJet composed_jet(const MarkovPartition& part, const std::vector<std::size_t>& ids,
                              double x) {
  const double crit = part.tolerances().critical;
  BranchJet acc{x, 1.0, 0.0};
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    const double z = branch_inverse(part, *it, acc.value);
    const Jet fj = part.jet(*it, z, crit);
    if (std::fabs(fj.derivative) < part.tolerances().derivative)
      throw DegenerateDerivativeError("branch derivative vanishes");
    const double gp = 1.0 / fj.derivative;
    const double ng = -fj.nonlinearity * gp;
    acc.nonlinearity = compose_nonlinearity(ng, acc.derivative, acc.nonlinearity);
    acc.derivative *= gp;
    acc.value = z;
  }
  return acc;
}

inline double composed_nonlinearity(const MarkovPartition& part, const BranchWord& word, double x) {
  return composed_jet(part, word.ids, x).nonlinearity;
}

struct Thresholds {
  double A = 100.0;
  double B = 100.0;
  double C = 1000.0;
};

struct RatioEntry {
  int k;
  int i;
  double ratio;
};

struct WordDistortion {
  std::string word;
  double domain_length;
  double sup;  ///< max over samples of |N(g_w)| |D(g_w)|
  int samples;
};

struct GapRatios {
  int k;
  double cycle_cycle;  ///< max over pairs of max(r, 1/r), |I_{k,j}| / |I_{k,j'}|
  double gap_gap;
  double gap_cycle;
};

struct DistortionReport {
  int depth = 0;
  int word_length = 0;
  int grid = 0;
  Thresholds thresholds;
  double A = 1.0;
  double B = 1.0;
  double C = 0.0;
  double C6 = 1.0;
  bool pass = false;
  std::vector<LemmaQuantities> lemma;
  std::vector<RatioEntry> adjacent;  ///< |M_{k,i}| / |M_{k,i+1}|
  std::vector<RatioEntry> core;      ///< |M_{k,i}| / |I_k|
  std::vector<WordDistortion> words;
  std::vector<GapRatios> gaps;
  std::vector<std::string> skipped_words;
};

namespace detail {
inline double symmetric_ratio(double r) { return std::max(r, 1.0 / r); }
}  // namespace detail

/// Bounded-distortion certificate up to the partition depth and word length L.
inline DistortionReport certify(const MarkovPartition& part, int word_length, int grid,
                                const Thresholds& thresholds = {}) {
  if (grid < 1) throw ParameterError("grid must contain at least one sample");
  DistortionReport rep;
  rep.depth = part.depth();
  rep.word_length = word_length;
  rep.grid = grid;
  rep.thresholds = thresholds;
  rep.lemma = lemma_quantities(part.tower());

  for (int k = 1; k <= part.depth(); ++k) {
    const auto ids = part.level_ids(k);
    const double core = part.tower().nested(k).length();
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const auto& e = part.element(ids[a]);
      const double r = e.interval.length() / core;
      rep.core.push_back({k, e.index, r});
      rep.B = std::max(rep.B, detail::symmetric_ratio(r));
      if (a + 1 < ids.size()) {
        const double ra = e.interval.length() / part.element(ids[a + 1]).interval.length();
        rep.adjacent.push_back({k, e.index, ra});
        rep.A = std::max(rep.A, detail::symmetric_ratio(ra));
      }
    }
    const LevelGaps& lg = part.gaps(k);
    GapRatios g{k, 1.0, 1.0, 1.0};
    const std::size_t cycles = lg.cycle.size() - 1;  // I_{k,n_k} lies inside I_k
    for (std::size_t i = 0; i < cycles; ++i) {
      for (std::size_t j = i + 1; j < cycles; ++j)
        g.cycle_cycle = std::max(
            g.cycle_cycle, detail::symmetric_ratio(lg.cycle[i].length() / lg.cycle[j].length()));
      for (const auto& gap : lg.gaps)
        g.gap_cycle = std::max(g.gap_cycle,
                               detail::symmetric_ratio(gap.length() / lg.cycle[i].length()));
    }
    for (std::size_t i = 0; i < lg.gaps.size(); ++i)
      for (std::size_t j = i + 1; j < lg.gaps.size(); ++j)
        g.gap_gap = std::max(
            g.gap_gap, detail::symmetric_ratio(lg.gaps[i].length() / lg.gaps[j].length()));
    rep.C6 = std::max({rep.C6, g.cycle_cycle, g.gap_gap, g.gap_cycle});
    rep.gaps.push_back(g);
  }

  for (const BranchWord& w : admissible_words(part, word_length)) {
    const double len = w.domain.length();
    WordDistortion wd{word_label(part, w.ids), len, 0.0, 0};
    for (int s = 0; s < grid; ++s) {
      const double x = w.domain.lo + len * (s + 0.5) / grid;
      try {
        const double n = composed_jet(part, w.ids, x).nonlinearity;
        wd.sup = std::max(wd.sup, std::fabs(n) * len);
        ++wd.samples;
      } catch (const CriticalProximityError&) {
      }
    }
    if (wd.samples == 0) {
      rep.skipped_words.push_back(wd.word);
    } else {
      rep.C = std::max(rep.C, wd.sup);
    }
    rep.words.push_back(std::move(wd));
  }
  rep.pass = rep.A <= thresholds.A && rep.B <= thresholds.B && rep.C <= thresholds.C;
  return rep;
}

}  // namespace renormlab
