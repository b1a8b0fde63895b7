#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "renormlab/conjugacy.hpp"
#include "renormlab/tune.hpp"

using namespace renormlab;

namespace {

struct Pair {
  RenormTower tf;
  RenormTower tg;
  MarkovPartition pf;
  MarkovPartition pg;
};

const Pair& doubling_pair() {
  static const Pair p = [] {
    auto tf = build_tower(make_affine_family(2.0, tune_parameter(2.0, {2, 2, 2, 2, 2}).c), 5, 2);
    auto tg = build_tower(make_affine_family(4.0, tune_parameter(4.0, {2, 2, 2, 2, 2}).c), 5, 2);
    auto pf = build_partition(tf, 5);
    auto pg = build_partition(tg, 5);
    return Pair{std::move(tf), std::move(tg), std::move(pf), std::move(pg)};
  }();
  return p;
}

}  // namespace

TEST(MatchTowers, DoublingPair) {
  const auto& p = doubling_pair();
  EXPECT_EQ(match_towers(p.tf, p.tg).depth, 5);
  EXPECT_EQ(match_towers(p.tf, p.tg, 3).depth, 3);
  EXPECT_THROW(match_towers(p.tf, p.tg, 6), ParameterError);
}

TEST(MatchTowers, SelfMatch) {
  const auto& p = doubling_pair();
  EXPECT_EQ(match_towers(p.tf, p.tf).depth, p.tf.depth());
}

TEST(MatchTowers, DoublingVersusTripling) {
  const auto tri = build_tower(make_affine_family(2.0, tune_parameter(2.0, {3, 3}).c), 2, 3);
  try {
    match_towers(doubling_pair().tf, tri);
    FAIL() << "expected a mismatch";
  } catch (const CombinatoricsMismatchError& e) {
    EXPECT_EQ(e.level, 1);
  }
}

TEST(BuildMesh, SelfConjugacyIsDiagonal) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pf, 3);
  for (const auto& pt : mesh.points()) EXPECT_EQ(pt.x, pt.y);
}

TEST(BuildMesh, PinnedEndpointsAndOrder) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pg, 3);
  const auto& pts = mesh.points();
  EXPECT_EQ(pts.front().x, -1.0);
  EXPECT_EQ(pts.front().y, -1.0);
  EXPECT_EQ(pts.back().x, 1.0);
  EXPECT_EQ(pts.back().y, 1.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    EXPECT_LT(pts[i].x, pts[i + 1].x);
    EXPECT_LT(pts[i].y, pts[i + 1].y);
  }
}

TEST(BuildMesh, WidthDoesNotGrowWithL) {
  const auto& p = doubling_pair();
  double prev = 3.0;
  for (int L = 1; L <= 4; ++L) {
    const double w = build_mesh(p.pf, p.pg, L).width();
    EXPECT_LE(w, prev);
    prev = w;
  }
}

TEST(BuildMesh, WithoutPreimagesUsesOnlyPartitionLandmarks) {
  const auto& p = doubling_pair();
  const auto bare = build_mesh(p.pf, p.pg, 2, 0);
  const auto rich = build_mesh(p.pf, p.pg, 2, 1);
  EXPECT_LT(bare.points().size(), rich.points().size());
  EXPECT_LE(rich.width(), bare.width());
}

TEST(BuildMesh, Equivariance) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pg, 4);
  const auto wf = admissible_words(p.pf, 4);
  const auto wg = admissible_words(p.pg, 4);
  ASSERT_EQ(wf.size(), wg.size());
  int checked = 0;
  for (std::size_t i = 0; i < wf.size() && checked < 200; ++i) {
    if (wf[i].length() < 2) continue;
    const auto first = wf[i].ids.front();
    for (int side = 0; side < 2 && checked < 200; ++side) {
      const double xf = side == 0 ? wf[i].cylinder.lo : wf[i].cylinder.hi;
      const double xg = side == 0 ? wg[i].cylinder.lo : wg[i].cylinder.hi;
      if (!p.pf.element(first).interval.interior_contains(xf)) continue;
      const double lhs = conjugacy_at(mesh, p.pf.apply(first, xf)).value;
      const double rhs = p.pg.apply(first, xg);
      EXPECT_NEAR(lhs, rhs, 1e-6) << word_label(p.pf, wf[i].ids);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 200);
}

TEST(BuildMesh, DepthMismatch) {
  const auto& p = doubling_pair();
  EXPECT_THROW(build_mesh(p.pf, build_partition(p.tg, 4), 2), ParameterError);
}

TEST(BuildMesh, AdmissibilityMustTransfer) {
  const auto tri = build_tower(make_affine_family(2.0, tune_parameter(2.0, {3, 3}).c), 2, 3);
  const auto dbl = build_partition(doubling_pair().tf, 2);
  EXPECT_THROW(build_mesh(dbl, build_partition(tri, 2), 2), AdmissibilityTransferError);
}

TEST(ConjugacyAt, IdentityOnSelfMesh) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pf, 3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    EXPECT_NEAR(conjugacy_at(mesh, x).value, x, 1e-15);
  }
}

TEST(ConjugacyAt, PinnedAndMonotone) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pg, 3);
  EXPECT_EQ(conjugacy_at(mesh, -1.0).value, -1.0);
  EXPECT_EQ(conjugacy_at(mesh, 1.0).value, 1.0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double x = u(rng), y = u(rng);
    if (x == y) continue;
    if (x > y) std::swap(x, y);
    EXPECT_LT(conjugacy_at(mesh, x).value, conjugacy_at(mesh, y).value);
  }
}

TEST(ConjugacyAt, CoreIsUnresolved) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pg, 3);
  EXPECT_TRUE(conjugacy_at(mesh, 0.0001).unresolved);
  EXPECT_FALSE(conjugacy_at(mesh, 0.5).unresolved);
  EXPECT_EQ(conjugacy_at(mesh, p.pf.core().hi).value, p.pg.core().hi);
}

TEST(ConjugacyAt, InverseConsistency) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pg, 3);
  const auto inv = mesh.inverse();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    EXPECT_NEAR(conjugacy_at(inv, conjugacy_at(mesh, x).value).value, x, mesh.width());
  }
}

TEST(QsModulus, IdentityMesh) {
  const auto& p = doubling_pair();
  const auto table = qs_modulus(build_mesh(p.pf, p.pf, 3), 3, 10, 501);
  for (const auto& r : table.rows) {
    ASSERT_GT(r.samples, 0);
    EXPECT_NEAR(r.max_rho, 1.0, 1e-12);
    EXPECT_NEAR(r.mean_rho, 1.0, 1e-12);
  }
}

TEST(QsModulus, AffineMesh) {
  // H(x) = 0.3 x + 0.2 sampled on the partition landmarks.
  const auto& p = doubling_pair();
  std::vector<MeshPoint> pts;
  for (double x : p.pf.landmarks()) pts.push_back({x, 0.3 * x + 0.2});
  const auto mesh = ConjugacyMesh::from_pairs(pts, {p.pf.core()});
  for (const auto& r : qs_modulus(mesh, 2, 9, 301).rows) {
    ASSERT_GT(r.samples, 0);
    EXPECT_NEAR(r.max_rho, 1.0, 1e-12);
  }
  for (const auto& r : qs_modulus(mesh.inverse(), 2, 9, 301).rows)
    if (r.samples > 0) EXPECT_NEAR(r.max_rho, 1.0, 1e-12);
}

TEST(QsModulus, DoublingPairBounded) {
  const auto& p = doubling_pair();
  const auto mesh = build_mesh(p.pf, p.pg, 4);
  const auto fwd = qs_modulus(mesh, 3, 10, 2001);
  const auto inv = qs_modulus(mesh.inverse(), 3, 10, 2001);
  ASSERT_EQ(fwd.rows.size(), 8u);
  for (std::size_t i = 0; i < fwd.rows.size(); ++i) {
    EXPECT_GT(fwd.rows[i].samples, 0);
    EXPECT_GT(inv.rows[i].samples, 0);
    EXPECT_TRUE(std::isfinite(fwd.rows[i].max_rho));
    EXPECT_TRUE(std::isfinite(inv.rows[i].max_rho));
    EXPECT_GE(fwd.rows[i].max_rho, 1.0);
  }
  // Past j = 6 the per-scale maximum is not a monotone increasing sequence.
  bool increasing = true;
  for (std::size_t i = 4; i < fwd.rows.size(); ++i)
    increasing = increasing && fwd.rows[i].max_rho > fwd.rows[i - 1].max_rho;
  EXPECT_FALSE(increasing);
  EXPECT_NEAR(fwd.excluded_measure, p.pf.core().length(), 0.0);
}

TEST(QsModulus, RefinementStabilityAtResolvedScales) {
  const auto& p = doubling_pair();
  const auto m3 = build_mesh(p.pf, p.pg, 3);
  const auto m4 = build_mesh(p.pf, p.pg, 4);
  const auto t3 = qs_modulus(m3, 3, 8, 2001);
  const auto t4 = qs_modulus(m4, 3, 8, 2001);
  int resolved = 0;
  for (std::size_t i = 0; i < t4.rows.size(); ++i) {
    if (!t4.rows[i].resolved) continue;
    EXPECT_LT(std::fabs(t4.rows[i].max_rho / t3.rows[i].max_rho - 1.0), 0.10) << "j " << t4.rows[i].j;
    ++resolved;
  }
  EXPECT_GT(resolved, 0);
}

TEST(QsModulus, UnderResolvedScalesWarn) {
  const auto& p = doubling_pair();
  const auto t = qs_modulus(build_mesh(p.pf, p.pg, 2), 3, 12, 101);
  EXPECT_FALSE(t.warnings.empty());
  EXPECT_FALSE(t.rows.back().resolved);
}

TEST(QsModulus, RejectsBadArguments) {
  const auto mesh = build_mesh(doubling_pair().pf, doubling_pair().pf, 1);
  EXPECT_THROW(qs_modulus(mesh, 5, 3, 100), ParameterError);
  EXPECT_THROW(qs_modulus(mesh, 3, 5, 1), ParameterError);
}

TEST(FromPairs, RejectsOrderReversal) {
  EXPECT_THROW(ConjugacyMesh::from_pairs({{-1.0, -1.0}, {0.0, 0.5}, {0.5, 0.2}, {1.0, 1.0}}), Error);
}
