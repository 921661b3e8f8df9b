#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crs/entourage.hpp"
#include "crs/geometry.hpp"
#include "crs/ground.hpp"

namespace crs {

// Tail behaviors of an eventually-affine map on one ray: beyond the finite
// table the map is either i ↦ a·i + b into a target ray (a >= 1) or
// constant.
struct AffineTail {
  std::uint64_t a = 1;
  std::int64_t b = 0;
  std::string dstRay;
  bool operator==(const AffineTail&) const = default;
};

struct ConstTail {
  Point value;
  bool operator==(const ConstTail&) const = default;
};

using Tail = std::variant<AffineTail, ConstTail>;

struct RayRule {
  std::vector<Point> table;  // images of 0 .. table.size()-1
  Tail tail;                 // behavior from table.size() on
  bool operator==(const RayRule&) const = default;
};

// A total eventually-affine map between ground spaces: point components map
// to fixed points, each ray has a finite exception table and an affine or
// constant tail. Closed under composition; images and preimages of
// ultimately periodic sets stay ultimately periodic.
class EAMap {
 public:
  EAMap() = default;

  static EAMap make(Space source, Space target, std::map<std::string, Point> ptImages,
                    std::map<std::string, RayRule> rayRules);
  static EAMap identity(const Space& sp);
  static EAMap constant(Space source, const Space& target, const Point& value);
  // Source with exactly one ray mapped by i ↦ a·i + b onto a target ray;
  // any point components must be absent.
  static EAMap affine(const Space& source, const Space& target,
                      const std::string& srcRay, std::uint64_t a, std::int64_t b,
                      const std::string& dstRay);

  const Space& source() const { return source_; }
  const Space& target() const { return target_; }

  Point apply(const Point& x) const;
  const RayRule& rayRule(const std::string& rayId) const;
  const Point& ptImage(const std::string& ptId) const;

  PointSet imageSet(const PointSet& s) const;
  PointSet preimageSet(const PointSet& s) const;
  PointSet range() const;

  // A constant ray tail is the only source of infinite fibers.
  struct ProperFailure {
    std::string srcRay;
    Point value;  // the target point with infinite fiber
  };
  std::optional<ProperFailure> impropernessWitness() const;
  bool isProper() const { return !impropernessWitness().has_value(); }
  // Properness of the restriction to a subset of the source.
  std::optional<ProperFailure> impropernessWitnessOn(const PointSet& s) const;

  bool operator==(const EAMap&) const = default;
  std::string toString() const;

 private:
  Space source_, target_;
  std::map<std::string, Point> ptImages_;
  std::map<std::string, RayRule> rayRules_;
};

// f ∘ g (g is applied first).
EAMap composeMaps(const EAMap& f, const EAMap& g);

// Pointwise-equal test is decidable: tables compare finitely, tails
// symbolically.
bool sameMap(const EAMap& f, const EAMap& g);

// ---------------------------------------------------------------------------
// Pair images (f × g)(F)
// ---------------------------------------------------------------------------

// Symbolic piece { ((r1, a1·i + b1), (r2, a2·i + b2)) : i ∈ support } with
// a1 ≠ a2 over an infinite support: exactly the images that have no
// band/rectangle form ("sheared" pieces).
struct ShearPiece {
  std::string r1;
  std::uint64_t a1 = 1;
  std::int64_t b1 = 0;
  std::string r2;
  std::uint64_t a2 = 1;
  std::int64_t b2 = 0;
  UPSet support;  // parameter set; always infinite in normal form
  bool operator==(const ShearPiece&) const = default;
  std::string toString() const;
};

// Exact image of a relation under a pair of maps: a concrete band/rectangle
// relation plus any sheared pieces.
struct SymRelation {
  Space space;  // target space
  Relation concrete;
  std::vector<ShearPiece> shears;

  bool hasShears() const { return !shears.empty(); }
  bool isEmptySet() const { return concrete.isEmpty() && shears.empty(); }
  bool memberPair(const Point& u, const Point& v) const;
  PointSet leftSupport() const;
  PointSet rightSupport() const;
  SymRelation transpose() const;
  static SymRelation ofRelation(const Relation& e);
  std::string toString() const;
};

// Exact (f × g)(F); F lives over the common source of f and g.
SymRelation pairImage(const EAMap& f, const EAMap& g, const Relation& F);

// Push an already-computed symbolic relation through a further pair of maps:
// (h × h')(s) exactly.
SymRelation pushPairImage(const EAMap& h, const EAMap& hp, const SymRelation& s);

// (f × f)(F) as a plain relation; throws UnsupportedShear when a sheared
// piece appears.
Relation pushRelation(const EAMap& f, const Relation& F);
std::optional<Relation> tryPushRelation(const EAMap& f, const EAMap& g,
                                        const Relation& F);

// Properness of the image set (f × g)(F): sheared pieces are always proper,
// so any failure is an infinite rectangle side of the concrete part.
std::optional<ImproperWitness> imageSetImproperness(const SymRelation& s);

// Properness of the restriction (f × g)|_F : F → X × X. An Out witness is a
// target pair with infinite preimage.
std::optional<std::pair<Point, Point>> restrictionImproperness(const EAMap& f,
                                                               const EAMap& g,
                                                               const Relation& F);

// Supports of the pair image: (f(lsupp F), g(rsupp F)).
std::pair<PointSet, PointSet> pairImageSupports(const EAMap& f, const EAMap& g,
                                                const Relation& F);

// Width of a symbolic relation with respect to a metric geometry.
struct WidthResult {
  bool bounded = true;
  std::uint64_t bound = 0;  // valid when bounded
  std::optional<std::pair<Point, Point>> witness;  // a far pair when unbounded
  std::string reason;  // unboundedness kind, for reports
};
WidthResult symWidthBound(const SymRelation& s, const MetricGeom& geom);
WidthResult pairWidthBound(const EAMap& f, const EAMap& g, const Relation& F,
                           const MetricGeom& geom);

// Local properness of f for F: image-set properness plus restriction
// properness of (f × f)|_F.
struct LocalProperness {
  bool in = true;
  std::optional<ImproperWitness> setWitness;
  std::optional<std::pair<Point, Point>> restrictionWitness;
};
LocalProperness locallyProperFor(const EAMap& f, const Relation& F);

}  // namespace crs
