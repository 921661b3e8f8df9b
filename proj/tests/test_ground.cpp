#include <crs/errors.hpp>
#include <crs/ground.hpp>

#include <doctest.h>

#include <random>

#include "support/naive.hpp"

using namespace crs;
using namespace crs::testing;

namespace {

Space twoRaysOnePt() {
  return Space::make({{"a", CompKind::Ray}, {"b", CompKind::Ray}, {"q", CompKind::Pt}});
}

}  // namespace

TEST_CASE("space construction and component lookup") {
  Space sp = twoRaysOnePt();
  CHECK(sp.size() == 3);
  CHECK(sp.has("a"));
  CHECK(sp.isRay("a"));
  CHECK_FALSE(sp.isRay("q"));
  CHECK(sp.hasRays());
  CHECK_FALSE(Space::points(3).hasRays());
  CHECK_THROWS_AS(sp.kindOf("zz"), ResolveError);
  CHECK_THROWS_AS(Space::make({{"x", CompKind::Ray}, {"x", CompKind::Pt}}),
                  InvalidArgument);
}

TEST_CASE("point set membership, slices and canonical equality") {
  Space sp = twoRaysOnePt();
  PointSet s = PointSet::ofRay(sp, "a", UPSet::evens()).withPoint({"q", 0});
  CHECK(s.contains({"a", 4}));
  CHECK_FALSE(s.contains({"a", 5}));
  CHECK_FALSE(s.contains({"b", 4}));
  CHECK(s.contains({"q", 0}));
  CHECK(s.ray("a") == UPSet::evens());
  CHECK(s.ray("b").isEmpty());
  CHECK(s.ptMember("q"));

  // Adding an empty slice changes nothing structurally.
  CHECK(s.withRay("b", UPSet::empty()) == s);
  CHECK(PointSet::ofRay(sp, "a", UPSet::empty()) == PointSet::empty(sp));
}

TEST_CASE("full and empty point sets") {
  Space sp = twoRaysOnePt();
  PointSet full = PointSet::full(sp);
  CHECK(full.contains({"a", 123}));
  CHECK(full.contains({"q", 0}));
  CHECK_FALSE(full.isFinite());
  CHECK(full.complement() == PointSet::empty(sp));
  CHECK(PointSet::empty(sp).complement() == full);
  CHECK(PointSet::empty(sp).isEmpty());
  CHECK(PointSet::empty(sp).isFinite());
  CHECK(PointSet::empty(sp).finiteSize() == 0);
}

TEST_CASE("boolean point set operations work componentwise") {
  Space sp = twoRaysOnePt();
  PointSet x = PointSet::ofRay(sp, "a", UPSet::evens())
                   .withRay("b", UPSet::fromIndex(5))
                   .withPoint({"q", 0});
  PointSet y = PointSet::ofRay(sp, "a", UPSet::multiplesOf(3));

  PointSet meet = x.intersect(y);
  CHECK(meet.ray("a") == UPSet::multiplesOf(6));
  CHECK(meet.ray("b").isEmpty());
  CHECK_FALSE(meet.ptMember("q"));

  PointSet join = x.unite(y);
  CHECK(join.ray("a") == UPSet::evens().unite(UPSet::multiplesOf(3)));
  CHECK(join.ray("b") == UPSet::fromIndex(5));
  CHECK(join.ptMember("q"));

  PointSet diff = x.difference(y);
  CHECK(diff.ray("a") == UPSet::evens().difference(UPSet::multiplesOf(3)));
  CHECK(diff.ptMember("q"));

  CHECK(x.complement().ray("a") == UPSet::odds());
  CHECK(x.complement().ray("b") == UPSet::range(0, 4));
  CHECK_FALSE(x.complement().ptMember("q"));
}

TEST_CASE("combining sets over different spaces is an error") {
  PointSet a = PointSet::full(Space::ray("a"));
  PointSet b = PointSet::full(Space::ray("b"));
  CHECK_THROWS_AS((void)a.unite(b), SpaceMismatch);
  CHECK_THROWS_AS((void)a.intersect(b), SpaceMismatch);
  CHECK_THROWS_AS((void)a.subsetOf(b), SpaceMismatch);
}

TEST_CASE("finiteness and size of point sets") {
  Space sp = twoRaysOnePt();
  PointSet fin = PointSet::ofRay(sp, "a", UPSet::range(2, 5)).withPoint({"q", 0});
  CHECK(fin.isFinite());
  CHECK(fin.finiteSize() == 5);
  CHECK_FALSE(PointSet::ofRay(sp, "b", UPSet::odds()).isFinite());
}

TEST_CASE("subset testing with least witnesses in component order") {
  Space sp = twoRaysOnePt();
  PointSet x = PointSet::ofRay(sp, "a", UPSet::evens()).withPoint({"q", 0});
  PointSet y = PointSet::ofRay(sp, "a", UPSet::all());
  CHECK_FALSE(x.subsetOf(y));
  CHECK(x.subsetWitness(y) == Point{"q", 0});
  CHECK(x.difference(PointSet::ofPoints(sp, {{"q", 0}})).subsetOf(y));

  PointSet z = PointSet::ofRay(sp, "a", UPSet::multiplesOf(4));
  CHECK(z.subsetOf(x));
  CHECK_FALSE(z.subsetWitness(x).has_value());
  CHECK(x.subsetWitness(z) == Point{"a", 2});
}

TEST_CASE("enumeration lists point components and bounded ray members") {
  Space sp = twoRaysOnePt();
  PointSet x = PointSet::ofRay(sp, "b", UPSet::odds()).withPoint({"q", 0});
  auto pts = x.enumerate(5);
  CHECK(pts == std::vector<Point>{{"b", 1}, {"b", 3}, {"b", 5}, {"q", 0}});
  CHECK(x.anyElement() == Point{"b", 1});
  CHECK_FALSE(PointSet::empty(sp).anyElement().has_value());
}

TEST_CASE("point set algebra matches pointwise evaluation on random data") {
  std::mt19937_64 rng(42);
  Space sp = twoRaysOnePt();
  for (int it = 0; it < 200; ++it) {
    PointSet x = PointSet::ofRay(sp, "a", randomUPSet(rng))
                     .withRay("b", randomUPSet(rng));
    PointSet y = PointSet::ofRay(sp, "a", randomUPSet(rng))
                     .withRay("b", randomUPSet(rng));
    if (rng() & 1) x = x.withPoint({"q", 0});
    if (rng() & 1) y = y.withPoint({"q", 0});

    PointSet u = x.unite(y), m = x.intersect(y), d = x.difference(y);
    for (const auto& id : {std::string("a"), std::string("b")}) {
      for (std::uint64_t i = 0; i <= 40; ++i) {
        Point p{id, i};
        CHECK(u.contains(p) == (x.contains(p) || y.contains(p)));
        CHECK(m.contains(p) == (x.contains(p) && y.contains(p)));
        CHECK(d.contains(p) == (x.contains(p) && !y.contains(p)));
      }
    }
    Point q{"q", 0};
    CHECK(u.contains(q) == (x.contains(q) || y.contains(q)));
    CHECK((x.subsetOf(y)) == x.difference(y).isEmpty());
    auto w = x.subsetWitness(y);
    if (w) {
      CHECK(x.contains(*w));
      CHECK_FALSE(y.contains(*w));
    }
  }
}
