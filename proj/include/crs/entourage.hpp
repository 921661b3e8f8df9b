#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crs/ground.hpp"

namespace crs {

// Diagonal band between two ray components: the pairs
//   { ((src,i), (dst,i+offset)) : i ∈ support, i+offset >= 0 }.
// Canonical form clips the support so every image index is nonnegative.
struct Band {
  std::string src, dst;
  std::int64_t offset = 0;
  UPSet support;
  bool operator==(const Band&) const = default;
  auto operator<=>(const Band&) const = default;
};

// Full rectangle left × right. Sides may be infinite; an infinite side is
// exactly how a properness failure is represented.
struct Rect {
  PointSet left, right;
  bool operator==(const Rect&) const = default;
  auto operator<=>(const Rect&) const = default;
};

// A point together with the projection (1 = first, 2 = second) whose fiber
// over that point is infinite.
struct ImproperWitness {
  Point point;
  int projection = 1;
};

// A relation on a ground space in band/rectangle normal form: a finite
// union of diagonal bands and rectangles. Closed under union, composition,
// transposition and restriction; membership, supports, neighborhoods,
// subset testing and properness are all exact.
class Relation {
 public:
  Relation() = default;
  explicit Relation(Space sp) : space_(std::move(sp)) {}

  static Relation empty(Space sp) { return Relation(std::move(sp)); }
  static Relation make(Space sp, std::vector<Band> bands, std::vector<Rect> rects);
  static Relation band(const Space& sp, const std::string& src, const std::string& dst,
                       std::int64_t offset, const UPSet& support);
  static Relation rect(const PointSet& left, const PointSet& right);
  static Relation localUnit(const PointSet& s);  // 1_S
  static Relation fullUnit(const Space& sp);     // 1_X
  static Relation singlePair(const Space& sp, const Point& x, const Point& y);

  const Space& space() const { return space_; }
  const std::vector<Band>& bands() const { return bands_; }
  const std::vector<Rect>& rects() const { return rects_; }

  bool memberPair(const Point& x, const Point& y) const;
  bool isEmpty() const { return bands_.empty() && rects_.empty(); }
  bool isFinite() const;

  Relation unite(const Relation& o) const;
  Relation compose(const Relation& o) const;
  Relation transpose() const;
  // E ∩ (S × S)
  Relation restrict(const PointSet& s) const;
  // E ∩ (L × R)
  Relation intersectRect(const PointSet& l, const PointSet& r) const;

  PointSet leftSupport() const;
  PointSet rightSupport() const;
  // E·S: first projection of E ∘ 1_S.
  PointSet leftNbhd(const PointSet& s) const;
  // S·E: second projection of 1_S ∘ E.
  PointSet rightNbhd(const PointSet& s) const;

  // A pair in this relation missing from o, if any.
  std::optional<std::pair<Point, Point>> subsetWitness(const Relation& o) const;
  bool subsetOf(const Relation& o) const { return !subsetWitness(o).has_value(); }
  bool sameSetAs(const Relation& o) const;

  std::optional<ImproperWitness> impropernessWitness() const;
  bool isProper() const { return !impropernessWitness().has_value(); }

  // Fiber of the second coordinate over x: { y : (x,y) ∈ E }.
  PointSet fiberOver(const Point& x) const;
  // Fiber of the first coordinate under y: { x : (x,y) ∈ E }.
  PointSet cofiberOver(const Point& y) const;

  std::size_t pieceCount() const { return bands_.size() + rects_.size(); }
  bool operator==(const Relation&) const = default;
  std::string toString() const;

 private:
  Space space_;
  std::vector<Band> bands_;
  std::vector<Rect> rects_;

  void requireSameSpace(const Relation& o) const;
  void normalize();
};

}  // namespace crs
