#include <crs/entourage.hpp>
#include <crs/errors.hpp>

#include <doctest.h>

#include <random>

#include "support/gen.hpp"
#include "support/window.hpp"

using namespace crs;
using namespace crs::testing;

namespace {

const Space R1 = Space::ray("r");

Relation bandR(std::int64_t off, const UPSet& supp) {
  return Relation::band(R1, "r", "r", off, supp);
}

}  // namespace

TEST_CASE("bands over the same offset merge by support union") {
  Relation e = bandR(2, UPSet::evens()).unite(bandR(2, UPSet::odds()));
  CHECK(e == bandR(2, UPSet::all()));
  CHECK(e.bands().size() == 1);
}

TEST_CASE("band composition adds offsets and intersects shifted supports") {
  CHECK(bandR(2, UPSet::all()).compose(bandR(3, UPSet::all())) == bandR(5, UPSet::all()));
  // Middles of the first band land on evens+1 = odds, missing the second
  // band's even support entirely.
  CHECK(bandR(1, UPSet::evens()).compose(bandR(1, UPSet::evens())).isEmpty());
  // Support law: first support ∩ (second support shifted back by the first
  // offset).
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    UPSet A = randomUPSet(rng), B = randomUPSet(rng);
    std::uniform_int_distribution<std::int64_t> off(-6, 6);
    const std::int64_t k = off(rng), l = off(rng);
    Relation got = bandR(k, A).compose(bandR(l, B));
    Relation want = bandR(k + l, A.intersect(B.shift(-k)));
    CHECK(got == want);
  }
}

TEST_CASE("transposing a band negates the offset and shifts the support") {
  CHECK(bandR(3, UPSet::all()).transpose() == bandR(-3, UPSet::fromIndex(3)));
  CHECK(bandR(-3, UPSet::fromIndex(3)).transpose() == bandR(3, UPSet::all()));
}

TEST_CASE("left neighborhood picks up exactly the band sources") {
  Relation e = bandR(2, UPSet::all());
  PointSet s = PointSet::ofPoints(R1, {{"r", 10}});
  CHECK(e.leftNbhd(s) == PointSet::ofPoints(R1, {{"r", 8}}));
  // And the right neighborhood walks forward.
  CHECK(e.rightNbhd(s) == PointSet::ofPoints(R1, {{"r", 12}}));
}

TEST_CASE("restricting an odd-step band to evens removes everything") {
  CHECK(bandR(1, UPSet::all()).restrict(PointSet::ofRay(R1, "r", UPSet::evens())).isEmpty());
}

TEST_CASE("subset testing produces a concrete missing pair") {
  auto w = bandR(2, UPSet::all()).subsetWitness(bandR(2, UPSet::evens()));
  REQUIRE(w.has_value());
  CHECK(w->first == Point{"r", 1});
  CHECK(w->second == Point{"r", 3});
  CHECK(bandR(2, UPSet::evens()).subsetOf(bandR(2, UPSet::all())));
}

TEST_CASE("an infinite rectangle side is a properness failure") {
  Space sp = Space::make({{"r", CompKind::Ray}, {"q", CompKind::Pt}});
  Relation e = Relation::rect(PointSet::ofRay(sp, "r", UPSet::all()),
                              PointSet::ofPoints(sp, {{"q", 0}}));
  auto w = e.impropernessWitness();
  REQUIRE(w.has_value());
  CHECK(w->point == Point{"q", 0});
  CHECK(w->projection == 2);
  CHECK_FALSE(e.isProper());
  CHECK(e.transpose().impropernessWitness()->projection == 1);

  CHECK(bandR(5, UPSet::all()).isProper());
  Relation fin = Relation::rect(PointSet::ofRay(sp, "r", UPSet::range(0, 3)),
                                PointSet::ofRay(sp, "r", UPSet::range(5, 9)));
  CHECK(fin.isProper());
}

TEST_CASE("single cross-kind pairs and local units normalize sensibly") {
  Space sp = mixedSpace();
  Relation unit = Relation::fullUnit(sp);
  CHECK(unit.memberPair({"a", 7}, {"a", 7}));
  CHECK(unit.memberPair({"q", 0}, {"q", 0}));
  CHECK_FALSE(unit.memberPair({"a", 7}, {"a", 8}));
  CHECK_FALSE(unit.memberPair({"a", 7}, {"b", 7}));

  // A 1x1 rectangle between ray points is the same relation as a one-element
  // band; the normal form makes them structurally equal.
  Relation asRect = Relation::rect(PointSet::ofPoints(sp, {{"a", 5}}),
                                   PointSet::ofPoints(sp, {{"b", 9}}));
  Relation asBand = Relation::band(sp, "a", "b", 4, UPSet::single(5));
  CHECK(asRect == asBand);

  Relation px = Relation::singlePair(sp, {"q", 0}, {"a", 3});
  CHECK(px.memberPair({"q", 0}, {"a", 3}));
  CHECK(px.isFinite());
}

TEST_CASE("negative offsets clip the support so images stay on the ray") {
  Relation e = bandR(-4, UPSet::all());
  CHECK_FALSE(e.memberPair({"r", 2}, {"r", 0}));
  CHECK(e.memberPair({"r", 4}, {"r", 0}));
  CHECK(e.bands().at(0).support == UPSet::fromIndex(4));
}

TEST_CASE("relation algebra agrees with the window oracle") {
  std::mt19937_64 rng(2026);
  const Space sp = mixedSpace();
  const std::uint64_t N = 48;
  for (int it = 0; it < 250; ++it) {
    Relation A = randomRelation(rng, sp), B = randomRelation(rng, sp);

    CHECK(materialize(A.unite(B), N) == naiveUnion(materialize(A, N), materialize(B, N)));
    CHECK(materialize(A.transpose(), N) == naiveTranspose(materialize(A, N)));

    const std::uint64_t M = composeMiddleWindow(A, B, N);
    CHECK(materialize(A.compose(B), N) ==
          filterWindow(naiveCompose(materialize(A, M), materialize(B, M)), N));

    PointSet S = randomPointSet(rng, sp);
    CHECK(materialize(A.restrict(S), N) == naiveRestrict(materialize(A, N), S));

    // Membership agrees with materialization.
    auto mat = materialize(A, N);
    for (int probe = 0; probe < 20; ++probe) {
      std::uniform_int_distribution<std::uint64_t> idx(0, N);
      Point x{(rng() & 1) ? "a" : "b", idx(rng)};
      Point y{(rng() & 1) ? "a" : "b", idx(rng)};
      CHECK(A.memberPair(x, y) == (mat.count({x, y}) > 0));
    }
  }
}

TEST_CASE("supports and neighborhoods match their defining projections") {
  std::mt19937_64 rng(31337);
  const Space sp = mixedSpace();
  const std::uint64_t N = 40;
  for (int it = 0; it < 200; ++it) {
    Relation A = randomRelation(rng, sp);
    PointSet S = randomPointSet(rng, sp);
    auto mat = materialize(A, N);

    PointSet ls = A.leftSupport(), rs = A.rightSupport();
    PointSet ln = A.leftNbhd(S), rn = A.rightNbhd(S);
    std::set<Point> wantLs, wantRs, wantLn, wantRn;
    for (const auto& [x, y] : mat) {
      wantLs.insert(x);
      wantRs.insert(y);
      if (S.contains(y)) wantLn.insert(x);
      if (S.contains(x)) wantRn.insert(y);
    }
    for (std::uint64_t i = 0; i <= N; ++i) {
      for (const auto& cid : {std::string("a"), std::string("b")}) {
        Point p{cid, i};
        // Window-interior points are classified exactly; the witnessing
        // partner of an interior point lies within one max offset.
        if (i + maxAbsOffset(A) + maxThreshold(A) <= N) {
          CHECK(ls.contains(p) == (wantLs.count(p) > 0));
          CHECK(rs.contains(p) == (wantRs.count(p) > 0));
          CHECK(ln.contains(p) == (wantLn.count(p) > 0));
          CHECK(rn.contains(p) == (wantRn.count(p) > 0));
        }
      }
    }
    // Support identities: lsupp(Eᵀ) = rsupp(E), E·X = lsupp(E).
    CHECK(A.transpose().leftSupport() == rs);
    CHECK(A.leftNbhd(PointSet::full(sp)) == ls);
    CHECK(A.rightNbhd(PointSet::full(sp)) == rs);
  }
}

TEST_CASE("subset testing agrees with the window oracle") {
  std::mt19937_64 rng(424242);
  const Space sp = mixedSpace();
  for (int it = 0; it < 300; ++it) {
    Relation A = randomRelation(rng, sp), B = randomRelation(rng, sp);
    auto w = A.subsetWitness(B);
    const std::uint64_t N =
        64 + maxAbsOffset(A) + maxAbsOffset(B) + maxThreshold(A) + maxThreshold(B);
    if (w) {
      CHECK(A.memberPair(w->first, w->second));
      CHECK_FALSE(B.memberPair(w->first, w->second));
    } else {
      // No pair of A within a window reaching past all transients may be
      // missing from B.
      for (const auto& p : materialize(A, N)) CHECK(B.memberPair(p.first, p.second));
    }
    // Mutual subset tests define semantic equality; A must equal itself
    // after a union with a sub-relation.
    CHECK(A.sameSetAs(A.unite(A.restrict(A.leftSupport()))));
  }
}

TEST_CASE("composition is associative and distributes over union") {
  std::mt19937_64 rng(5150);
  const Space sp = mixedSpace();
  const std::uint64_t N = 32;
  for (int it = 0; it < 120; ++it) {
    Relation A = randomRelation(rng, sp), B = randomRelation(rng, sp),
             C = randomRelation(rng, sp);
    Relation l = A.compose(B).compose(C), r = A.compose(B.compose(C));
    CHECK(l.sameSetAs(r));
    CHECK(A.compose(B.unite(C)).sameSetAs(A.compose(B).unite(A.compose(C))));
    CHECK(A.compose(B).transpose().sameSetAs(B.transpose().compose(A.transpose())));
    CHECK(A.transpose().transpose() == A);
    (void)N;
  }
}

TEST_CASE("units act as identities and unit composition restricts") {
  std::mt19937_64 rng(777);
  const Space sp = mixedSpace();
  for (int it = 0; it < 150; ++it) {
    Relation A = randomRelation(rng, sp);
    PointSet S = randomPointSet(rng, sp);
    CHECK(Relation::fullUnit(sp).compose(A).sameSetAs(A));
    CHECK(A.compose(Relation::fullUnit(sp)).sameSetAs(A));
    // E ∘ 1_S keeps exactly the pairs whose right end lies in S.
    CHECK(A.compose(Relation::localUnit(S))
              .sameSetAs(A.intersectRect(PointSet::full(sp), S)));
    CHECK(Relation::localUnit(S).compose(A)
              .sameSetAs(A.intersectRect(S, PointSet::full(sp))));
  }
}

TEST_CASE("neighborhood action is compatible with composition") {
  std::mt19937_64 rng(31415);
  const Space sp = mixedSpace();
  for (int it = 0; it < 150; ++it) {
    Relation A = randomRelation(rng, sp), B = randomRelation(rng, sp);
    PointSet S = randomPointSet(rng, sp);
    CHECK(A.compose(B).leftNbhd(S) == A.leftNbhd(B.leftNbhd(S)));
    CHECK(S == PointSet::empty(sp).unite(S));
    CHECK(A.leftNbhd(PointSet::empty(sp)).isEmpty());
  }
}

TEST_CASE("properness witnesses identify infinite fibers") {
  std::mt19937_64 rng(86);
  const Space sp = mixedSpace();
  for (int it = 0; it < 200; ++it) {
    Relation A = randomRelation(rng, sp);
    auto w = A.impropernessWitness();
    bool hasInfiniteRectSide = false;
    for (const Rect& r : A.rects())
      hasInfiniteRectSide |= !r.left.isFinite() || !r.right.isFinite();
    CHECK(w.has_value() == hasInfiniteRectSide);
    if (w) {
      PointSet fiber = w->projection == 2 ? A.cofiberOver(w->point) : A.fiberOver(w->point);
      CHECK_FALSE(fiber.isFinite());
    } else {
      // Every fiber over a sample of points is finite.
      for (std::uint64_t i = 0; i < 5; ++i) {
        CHECK(A.fiberOver({"a", i}).isFinite());
        CHECK(A.cofiberOver({"b", i}).isFinite());
      }
    }
  }
}
