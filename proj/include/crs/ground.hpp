#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crs/upset.hpp"

namespace crs {

// A ground space is a finite list of named components; each component is
// either a ray (a copy of the natural numbers) or a single point.
enum class CompKind { Ray, Pt };

struct Component {
  std::string id;
  CompKind kind = CompKind::Ray;
  bool operator==(const Component&) const = default;
  auto operator<=>(const Component&) const = default;
};

class Space {
 public:
  Space() = default;
  static Space make(std::vector<Component> comps);
  // One ray named `id`.
  static Space ray(const std::string& id = "r0");
  // One point named `id`.
  static Space point(const std::string& id = "p0");
  // n rays named r0..r{n-1}.
  static Space rays(std::size_t n);
  // n points named p0..p{n-1}.
  static Space points(std::size_t n);

  const std::vector<Component>& components() const { return comps_; }
  bool has(const std::string& id) const;
  CompKind kindOf(const std::string& id) const;  // throws ResolveError
  bool isRay(const std::string& id) const { return kindOf(id) == CompKind::Ray; }
  bool hasRays() const;
  // A space with no rays has finitely many points.
  bool isFinitePointCount() const { return !hasRays(); }
  std::size_t size() const { return comps_.size(); }

  bool operator==(const Space&) const = default;
  auto operator<=>(const Space&) const = default;
  std::string toString() const;

 private:
  std::vector<Component> comps_;
};

struct Point {
  std::string comp;
  std::uint64_t index = 0;  // always 0 on point components
  bool operator==(const Point&) const = default;
  auto operator<=>(const Point&) const = default;
  std::string toString() const;
};

// A subset of a ground space: an ultimately periodic set per ray plus a
// finite set of point components. Canonical (only nonempty ray slices are
// stored), so structural equality is semantic equality.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Space sp) : space_(std::move(sp)) {}

  static PointSet empty(Space sp) { return PointSet(std::move(sp)); }
  static PointSet full(const Space& sp);
  static PointSet ofRay(const Space& sp, const std::string& rayId, const UPSet& s);
  static PointSet ofPoints(const Space& sp, const std::vector<Point>& pts);

  const Space& space() const { return space_; }

  bool contains(const Point& x) const;
  bool isEmpty() const;
  bool isFinite() const;
  // Number of members; only valid when finite.
  std::uint64_t finiteSize() const;

  PointSet unite(const PointSet& o) const;
  PointSet intersect(const PointSet& o) const;
  PointSet difference(const PointSet& o) const;
  PointSet complement() const;

  bool subsetOf(const PointSet& o) const;
  // A member of this set missing from o, if any (first by component order,
  // smallest index within a ray).
  std::optional<Point> subsetWitness(const PointSet& o) const;
  std::optional<Point> anyElement() const;
  // All point-component members plus every ray member with index <= bound,
  // in component order.
  std::vector<Point> enumerate(std::uint64_t perRayBound) const;

  // Slice on a ray component (empty set for point components or ids not
  // present).
  UPSet ray(const std::string& id) const;
  bool ptMember(const std::string& id) const;
  const std::map<std::string, UPSet>& raySlices() const { return rays_; }
  const std::set<std::string>& ptMembers() const { return pts_; }

  PointSet withRay(const std::string& rayId, const UPSet& s) const;
  PointSet withPoint(const Point& x) const;

  bool operator==(const PointSet&) const = default;
  auto operator<=>(const PointSet&) const = default;
  std::string toString() const;

 private:
  Space space_;
  std::map<std::string, UPSet> rays_;  // nonempty slices only
  std::set<std::string> pts_;

  void requireSameSpace(const PointSet& o) const;
};

}  // namespace crs
