#include "crs/coarsemap.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "crs/errors.hpp"

namespace crs {

namespace {

std::int64_t toS(std::uint64_t v) { return static_cast<std::int64_t>(v); }
std::uint64_t toU(std::int64_t v) { return static_cast<std::uint64_t>(v); }

// Least i >= 0 with a*i + b >= t  (a >= 1).
std::uint64_t firstAtLeast(std::int64_t t, std::uint64_t a, std::int64_t b) {
  const std::int64_t num = t - b;
  if (num <= 0) return 0;
  return toU((num + toS(a) - 1) / toS(a));
}

void validatePoint(const Space& sp, const Point& p, const char* what) {
  if (!sp.has(p.comp))
    throw InvalidArgument(std::string(what) + ": unknown component '" + p.comp + "'");
  if (sp.kindOf(p.comp) == CompKind::Pt && p.index != 0)
    throw InvalidArgument(std::string(what) + ": point component '" + p.comp +
                          "' has only index 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// EAMap
// ---------------------------------------------------------------------------

EAMap EAMap::make(Space source, Space target, std::map<std::string, Point> ptImages,
                  std::map<std::string, RayRule> rayRules) {
  for (const auto& [id, p] : ptImages) {
    if (!source.has(id) || source.kindOf(id) != CompKind::Pt)
      throw InvalidArgument("map: '" + id + "' is not a point component of the source");
    validatePoint(target, p, "map");
  }
  for (auto& [id, rule] : rayRules) {
    if (!source.has(id) || source.kindOf(id) != CompKind::Ray)
      throw InvalidArgument("map: '" + id + "' is not a ray of the source");
    for (const Point& p : rule.table) validatePoint(target, p, "map table");
    if (const auto* aff = std::get_if<AffineTail>(&rule.tail)) {
      if (aff->a == 0) throw InvalidArgument("map: affine tail slope must be >= 1");
      if (!target.has(aff->dstRay) || target.kindOf(aff->dstRay) != CompKind::Ray)
        throw InvalidArgument("map: affine tail must land on a target ray");
      if (toS(aff->a) * toS(rule.table.size()) + aff->b < 0)
        throw InvalidArgument("map: affine tail is negative at the table end");
    } else {
      validatePoint(target, std::get<ConstTail>(rule.tail).value, "map tail");
    }
    // Canonical form: fold trailing table entries that agree with the tail.
    for (;;) {
      if (rule.table.empty()) break;
      const std::uint64_t idx = rule.table.size() - 1;
      if (const auto* aff = std::get_if<AffineTail>(&rule.tail)) {
        const std::int64_t v = toS(aff->a) * toS(idx) + aff->b;
        if (v < 0 || rule.table.back() != Point{aff->dstRay, toU(v)}) break;
      } else if (rule.table.back() != std::get<ConstTail>(rule.tail).value) {
        break;
      }
      rule.table.pop_back();
    }
  }
  for (const Component& c : source.components()) {
    if (c.kind == CompKind::Pt && !ptImages.count(c.id))
      throw InvalidArgument("map: missing image for point component '" + c.id + "'");
    if (c.kind == CompKind::Ray && !rayRules.count(c.id))
      throw InvalidArgument("map: missing rule for ray '" + c.id + "'");
  }

  EAMap m;
  m.source_ = std::move(source);
  m.target_ = std::move(target);
  m.ptImages_ = std::move(ptImages);
  m.rayRules_ = std::move(rayRules);
  return m;
}

EAMap EAMap::identity(const Space& sp) {
  std::map<std::string, Point> pts;
  std::map<std::string, RayRule> rays;
  for (const Component& c : sp.components()) {
    if (c.kind == CompKind::Pt)
      pts[c.id] = Point{c.id, 0};
    else
      rays[c.id] = RayRule{{}, AffineTail{1, 0, c.id}};
  }
  return make(sp, sp, std::move(pts), std::move(rays));
}

EAMap EAMap::constant(Space source, const Space& target, const Point& value) {
  std::map<std::string, Point> pts;
  std::map<std::string, RayRule> rays;
  for (const Component& c : source.components()) {
    if (c.kind == CompKind::Pt)
      pts[c.id] = value;
    else
      rays[c.id] = RayRule{{}, ConstTail{value}};
  }
  return make(std::move(source), target, std::move(pts), std::move(rays));
}

EAMap EAMap::affine(const Space& source, const Space& target, const std::string& srcRay,
                    std::uint64_t a, std::int64_t b, const std::string& dstRay) {
  std::map<std::string, RayRule> rays;
  rays[srcRay] = RayRule{{}, AffineTail{a, b, dstRay}};
  return make(source, target, {}, std::move(rays));
}

Point EAMap::apply(const Point& x) const {
  validatePoint(source_, x, "apply");
  if (source_.kindOf(x.comp) == CompKind::Pt) return ptImages_.at(x.comp);
  const RayRule& r = rayRules_.at(x.comp);
  if (x.index < r.table.size()) return r.table[x.index];
  if (const auto* aff = std::get_if<AffineTail>(&r.tail))
    return Point{aff->dstRay, toU(toS(aff->a) * toS(x.index) + aff->b)};
  return std::get<ConstTail>(r.tail).value;
}

const RayRule& EAMap::rayRule(const std::string& rayId) const {
  const auto it = rayRules_.find(rayId);
  if (it == rayRules_.end()) throw ResolveError("no ray '" + rayId + "' in map source");
  return it->second;
}

const Point& EAMap::ptImage(const std::string& ptId) const {
  const auto it = ptImages_.find(ptId);
  if (it == ptImages_.end())
    throw ResolveError("no point component '" + ptId + "' in map source");
  return it->second;
}

PointSet EAMap::imageSet(const PointSet& s) const {
  if (s.space() != source_) throw SpaceMismatch("imageSet: set lives elsewhere");
  PointSet out(target_);
  for (const std::string& id : s.ptMembers()) out = out.withPoint(apply(Point{id, 0}));
  for (const auto& [id, slice] : s.raySlices()) {
    const RayRule& r = rayRules_.at(id);
    const std::uint64_t t = r.table.size();
    if (t > 0)
      for (std::uint64_t i : slice.intersect(UPSet::range(0, t - 1)).enumerate(t - 1))
        out = out.withPoint(r.table[i]);
    const UPSet tail = slice.intersect(UPSet::fromIndex(t));
    if (tail.isEmpty()) continue;
    if (const auto* aff = std::get_if<AffineTail>(&r.tail))
      out = out.withRay(aff->dstRay, out.ray(aff->dstRay)
                                         .unite(tail.affineImage(aff->a, aff->b)));
    else
      out = out.withPoint(std::get<ConstTail>(r.tail).value);
  }
  return out;
}

PointSet EAMap::preimageSet(const PointSet& s) const {
  if (s.space() != target_) throw SpaceMismatch("preimageSet: set lives elsewhere");
  PointSet out(source_);
  for (const Component& c : source_.components()) {
    if (c.kind == CompKind::Pt) {
      if (s.contains(ptImages_.at(c.id))) out = out.withPoint(Point{c.id, 0});
      continue;
    }
    const RayRule& r = rayRules_.at(c.id);
    UPSet pre = UPSet::empty();
    for (std::uint64_t i = 0; i < r.table.size(); ++i)
      if (s.contains(r.table[i])) pre = pre.unite(UPSet::single(i));
    const std::uint64_t t = r.table.size();
    if (const auto* aff = std::get_if<AffineTail>(&r.tail)) {
      pre = pre.unite(s.ray(aff->dstRay)
                          .affinePreimage(aff->a, aff->b)
                          .intersect(UPSet::fromIndex(t)));
    } else if (s.contains(std::get<ConstTail>(r.tail).value)) {
      pre = pre.unite(UPSet::fromIndex(t));
    }
    out = out.withRay(c.id, pre);
  }
  return out;
}

PointSet EAMap::range() const { return imageSet(PointSet::full(source_)); }

std::optional<EAMap::ProperFailure> EAMap::impropernessWitness() const {
  return impropernessWitnessOn(PointSet::full(source_));
}

std::optional<EAMap::ProperFailure> EAMap::impropernessWitnessOn(
    const PointSet& s) const {
  if (s.space() != source_) throw SpaceMismatch("properness: set lives elsewhere");
  for (const Component& c : source_.components()) {
    if (c.kind != CompKind::Ray) continue;
    const RayRule& r = rayRules_.at(c.id);
    const auto* ct = std::get_if<ConstTail>(&r.tail);
    if (!ct) continue;
    const UPSet tail = s.ray(c.id).intersect(UPSet::fromIndex(r.table.size()));
    if (!tail.isFinite()) return ProperFailure{c.id, ct->value};
  }
  return std::nullopt;
}

std::string EAMap::toString() const {
  std::ostringstream os;
  os << "map{";
  bool first = true;
  for (const auto& [id, p] : ptImages_) {
    os << (first ? "" : ", ") << id << " -> " << p.toString();
    first = false;
  }
  for (const auto& [id, r] : rayRules_) {
    os << (first ? "" : ", ") << id << ": ";
    first = false;
    os << "[";
    for (std::size_t i = 0; i < r.table.size(); ++i)
      os << (i ? "," : "") << r.table[i].toString();
    os << "] then ";
    if (const auto* aff = std::get_if<AffineTail>(&r.tail))
      os << aff->a << "*i" << (aff->b < 0 ? "" : "+") << aff->b << " @ " << aff->dstRay;
    else
      os << "const " << std::get<ConstTail>(r.tail).value.toString();
  }
  os << "}";
  return os.str();
}

EAMap composeMaps(const EAMap& f, const EAMap& g) {
  if (g.target() != f.source())
    throw SpaceMismatch("compose: inner target differs from outer source");
  std::map<std::string, Point> pts;
  std::map<std::string, RayRule> rays;
  for (const Component& c : g.source().components()) {
    if (c.kind == CompKind::Pt) {
      pts[c.id] = f.apply(g.apply(Point{c.id, 0}));
      continue;
    }
    const RayRule& gr = g.rayRule(c.id);
    RayRule out;
    if (const auto* aff = std::get_if<AffineTail>(&gr.tail)) {
      const RayRule& fr = f.rayRule(aff->dstRay);
      // Fold everything that lands in the outer table; beyond that the outer
      // tail applies and composes symbolically (g's own invariant keeps its
      // tail values at or above g's table end, so no negative index arises).
      const std::uint64_t head =
          std::max<std::uint64_t>(gr.table.size(),
                                  firstAtLeast(toS(fr.table.size()), aff->a, aff->b));
      for (std::uint64_t i = 0; i < head; ++i)
        out.table.push_back(f.apply(g.apply(Point{c.id, i})));
      if (const auto* faff = std::get_if<AffineTail>(&fr.tail))
        out.tail = AffineTail{faff->a * aff->a,
                              toS(faff->a) * aff->b + faff->b, faff->dstRay};
      else
        out.tail = fr.tail;
    } else {
      for (const Point& p : gr.table) out.table.push_back(f.apply(p));
      out.tail = ConstTail{f.apply(std::get<ConstTail>(gr.tail).value)};
    }
    rays[c.id] = std::move(out);
  }
  return EAMap::make(g.source(), f.target(), std::move(pts), std::move(rays));
}

bool sameMap(const EAMap& f, const EAMap& g) { return f == g; }

// ---------------------------------------------------------------------------
// Pair images
// ---------------------------------------------------------------------------

namespace {

// One leg of a parametric family of pairs over a common parameter set:
// either constant, or i -> (ray, a*i + b).
struct Traj {
  bool isConst = false;
  Point value;
  std::string ray;
  std::uint64_t a = 1;
  std::int64_t b = 0;
};

// The tail of `rule` evaluated along i -> scale*i + shift (valid where that
// argument is past the rule's table).
Traj trajOfTail(const Tail& tail, std::uint64_t scale, std::int64_t shift) {
  if (const auto* aff = std::get_if<AffineTail>(&tail))
    return Traj{false, {}, aff->dstRay, aff->a * scale, toS(aff->a) * shift + aff->b};
  return Traj{true, std::get<ConstTail>(tail).value, {}, 1, 0};
}

struct PieceSink {
  const Space& space;
  std::vector<Band> bands;
  std::vector<Rect> rects;
  std::vector<ShearPiece> shears;

  void pair(const Point& u, const Point& v) {
    rects.push_back(Rect{PointSet::ofPoints(space, {u}), PointSet::ofPoints(space, {v})});
  }

  // All pairs (t1(i), t2(i)) for i in the parameter set; both legs are
  // assumed valid (nonnegative) on it.
  void parametric(const Traj& t1, const Traj& t2, const UPSet& params) {
    if (params.isEmpty()) return;
    if (t1.isConst && t2.isConst) {
      pair(t1.value, t2.value);
    } else if (t1.isConst) {
      rects.push_back(Rect{PointSet::ofPoints(space, {t1.value}),
                           PointSet::ofRay(space, t2.ray,
                                           params.affineImage(t2.a, t2.b))});
    } else if (t2.isConst) {
      rects.push_back(Rect{PointSet::ofRay(space, t1.ray,
                                           params.affineImage(t1.a, t1.b)),
                           PointSet::ofPoints(space, {t2.value})});
    } else if (t1.a == t2.a) {
      bands.push_back(Band{t1.ray, t2.ray, t2.b - t1.b,
                           params.affineImage(t1.a, t1.b)});
    } else if (params.isFinite()) {
      for (std::uint64_t i : params.enumerate(*params.maxElement()))
        pair(Point{t1.ray, toU(toS(t1.a) * toS(i) + t1.b)},
             Point{t2.ray, toU(toS(t2.a) * toS(i) + t2.b)});
    } else {
      shears.push_back(ShearPiece{t1.ray, t1.a, t1.b, t2.ray, t2.a, t2.b, params});
    }
  }
};

std::vector<ShearPiece> mergeShears(std::vector<ShearPiece> shears) {
  auto key = [](const ShearPiece& s) {
    return std::tie(s.r1, s.a1, s.b1, s.r2, s.a2, s.b2);
  };
  std::sort(shears.begin(), shears.end(),
            [&](const ShearPiece& x, const ShearPiece& y) { return key(x) < key(y); });
  std::vector<ShearPiece> out;
  for (ShearPiece& s : shears) {
    if (!out.empty() && key(out.back()) == key(s))
      out.back().support = out.back().support.unite(s.support);
    else
      out.push_back(std::move(s));
  }
  return out;
}

void requirePairLegs(const EAMap& f, const EAMap& g, const Space& over) {
  if (f.source() != over || g.source() != over)
    throw SpaceMismatch("pair image: relation lives over a different space");
  if (f.target() != g.target())
    throw SpaceMismatch("pair image: legs have different targets");
}

}  // namespace

std::string ShearPiece::toString() const {
  std::ostringstream os;
  os << "shear{(" << r1 << "," << a1 << "*i" << (b1 < 0 ? "" : "+") << b1 << "),("
     << r2 << "," << a2 << "*i" << (b2 < 0 ? "" : "+") << b2
     << ") : i in " << support.toString() << "}";
  return os.str();
}

bool SymRelation::memberPair(const Point& u, const Point& v) const {
  if (concrete.memberPair(u, v)) return true;
  for (const ShearPiece& s : shears) {
    if (u.comp != s.r1 || v.comp != s.r2) continue;
    const std::int64_t num = toS(u.index) - s.b1;
    if (num < 0 || num % toS(s.a1) != 0) continue;
    const std::uint64_t i = toU(num / toS(s.a1));
    if (toS(s.a2) * toS(i) + s.b2 == toS(v.index) && s.support.contains(i))
      return true;
  }
  return false;
}

PointSet SymRelation::leftSupport() const {
  PointSet out = concrete.leftSupport();
  for (const ShearPiece& s : shears)
    out = out.unite(PointSet::ofRay(space, s.r1, s.support.affineImage(s.a1, s.b1)));
  return out;
}

PointSet SymRelation::rightSupport() const {
  PointSet out = concrete.rightSupport();
  for (const ShearPiece& s : shears)
    out = out.unite(PointSet::ofRay(space, s.r2, s.support.affineImage(s.a2, s.b2)));
  return out;
}

SymRelation SymRelation::transpose() const {
  std::vector<ShearPiece> sw;
  sw.reserve(shears.size());
  for (const ShearPiece& s : shears)
    sw.push_back(ShearPiece{s.r2, s.a2, s.b2, s.r1, s.a1, s.b1, s.support});
  return SymRelation{space, concrete.transpose(), mergeShears(std::move(sw))};
}

SymRelation SymRelation::ofRelation(const Relation& e) {
  return SymRelation{e.space(), e, {}};
}

std::string SymRelation::toString() const {
  std::ostringstream os;
  os << concrete.toString();
  for (const ShearPiece& s : shears) os << " + " << s.toString();
  return os.str();
}

SymRelation pairImage(const EAMap& f, const EAMap& g, const Relation& F) {
  requirePairLegs(f, g, F.space());
  const Space& T = f.target();
  PieceSink sink{T, {}, {}, {}};

  for (const Band& band : F.bands()) {
    const RayRule& rf = f.rayRule(band.src);
    const RayRule& rg = g.rayRule(band.dst);
    // Below this bound one of the legs reads its exception table.
    const std::int64_t hb =
        std::max<std::int64_t>({toS(rf.table.size()),
                                toS(rg.table.size()) - band.offset, 0});
    if (hb > 0) {
      const UPSet head = band.support.intersect(UPSet::range(0, toU(hb) - 1));
      for (std::uint64_t i : head.enumerate(toU(hb) - 1))
        sink.pair(f.apply(Point{band.src, i}),
                  g.apply(Point{band.dst, toU(toS(i) + band.offset)}));
    }
    const UPSet tail = band.support.intersect(UPSet::fromIndex(toU(hb)));
    sink.parametric(trajOfTail(rf.tail, 1, 0), trajOfTail(rg.tail, 1, band.offset),
                    tail);
  }
  for (const Rect& r : F.rects())
    sink.rects.push_back(Rect{f.imageSet(r.left), g.imageSet(r.right)});

  return SymRelation{T, Relation::make(T, std::move(sink.bands), std::move(sink.rects)),
                     mergeShears(std::move(sink.shears))};
}

SymRelation pushPairImage(const EAMap& h, const EAMap& hp, const SymRelation& s) {
  requirePairLegs(h, hp, s.space);
  SymRelation base = pairImage(h, hp, s.concrete);
  const Space& T = h.target();
  PieceSink sink{T, {}, {}, {}};

  for (const ShearPiece& sh : s.shears) {
    const RayRule& r1 = h.rayRule(sh.r1);
    const RayRule& r2 = hp.rayRule(sh.r2);
    const std::uint64_t hb =
        std::max(firstAtLeast(toS(r1.table.size()), sh.a1, sh.b1),
                 firstAtLeast(toS(r2.table.size()), sh.a2, sh.b2));
    if (hb > 0) {
      const UPSet head = sh.support.intersect(UPSet::range(0, hb - 1));
      for (std::uint64_t i : head.enumerate(hb - 1))
        sink.pair(h.apply(Point{sh.r1, toU(toS(sh.a1) * toS(i) + sh.b1)}),
                  hp.apply(Point{sh.r2, toU(toS(sh.a2) * toS(i) + sh.b2)}));
    }
    const UPSet tail = sh.support.intersect(UPSet::fromIndex(hb));
    sink.parametric(trajOfTail(r1.tail, sh.a1, sh.b1), trajOfTail(r2.tail, sh.a2, sh.b2),
                    tail);
  }

  std::vector<ShearPiece> shears = std::move(base.shears);
  shears.insert(shears.end(), sink.shears.begin(), sink.shears.end());
  return SymRelation{
      T,
      base.concrete.unite(Relation::make(T, std::move(sink.bands), std::move(sink.rects))),
      mergeShears(std::move(shears))};
}

Relation pushRelation(const EAMap& f, const Relation& F) {
  SymRelation s = pairImage(f, f, F);
  if (s.hasShears())
    throw UnsupportedShear("image is not a band/rectangle relation: " +
                           s.shears.front().toString());
  return std::move(s.concrete);
}

std::optional<Relation> tryPushRelation(const EAMap& f, const EAMap& g,
                                        const Relation& F) {
  SymRelation s = pairImage(f, g, F);
  if (s.hasShears()) return std::nullopt;
  return std::move(s.concrete);
}

std::optional<ImproperWitness> imageSetImproperness(const SymRelation& s) {
  // Sheared pieces have strictly increasing legs, hence finite fibers; only
  // the concrete part can fail.
  return s.concrete.impropernessWitness();
}

std::optional<std::pair<Point, Point>> restrictionImproperness(const EAMap& f,
                                                               const EAMap& g,
                                                               const Relation& F) {
  requirePairLegs(f, g, F.space());
  for (const Band& band : F.bands()) {
    const RayRule& rf = f.rayRule(band.src);
    const RayRule& rg = g.rayRule(band.dst);
    const auto* cf = std::get_if<ConstTail>(&rf.tail);
    const auto* cg = std::get_if<ConstTail>(&rg.tail);
    if (!cf || !cg) continue;  // an affine leg separates parameters
    const std::int64_t hb =
        std::max<std::int64_t>({toS(rf.table.size()),
                                toS(rg.table.size()) - band.offset, 0});
    if (!band.support.intersect(UPSet::fromIndex(toU(hb))).isFinite())
      return std::make_pair(cf->value, cg->value);
  }
  for (const Rect& r : F.rects()) {
    if (const auto w = f.impropernessWitnessOn(r.left))
      return std::make_pair(w->value, g.apply(*r.right.anyElement()));
    if (const auto w = g.impropernessWitnessOn(r.right))
      return std::make_pair(f.apply(*r.left.anyElement()), w->value);
  }
  return std::nullopt;
}

std::pair<PointSet, PointSet> pairImageSupports(const EAMap& f, const EAMap& g,
                                                const Relation& F) {
  requirePairLegs(f, g, F.space());
  return {f.imageSet(F.leftSupport()), g.imageSet(F.rightSupport())};
}

// ---------------------------------------------------------------------------
// Widths
// ---------------------------------------------------------------------------

namespace {

// A support member far enough out that any unbounded piece evaluated there is
// farther than 100 (or at infinite distance).
std::uint64_t farParam(const UPSet& support, std::uint64_t clearance) {
  const auto m = support.nextMember(clearance);
  return m ? *m : *support.minElement();
}

}  // namespace

WidthResult symWidthBound(const SymRelation& s, const MetricGeom& geom) {
  if (geom.space() != s.space) throw SpaceMismatch("width: geometry over another space");
  WidthResult res;
  auto note = [&](std::uint64_t d) { res.bound = std::max(res.bound, d); };
  auto unbounded = [&](Point u, Point v, std::string reason) {
    res.bounded = false;
    res.witness = std::make_pair(std::move(u), std::move(v));
    res.reason = std::move(reason);
  };

  for (const Band& b : s.concrete.bands()) {
    if (b.src == b.dst) {
      note(toU(b.offset < 0 ? -b.offset : b.offset));
      continue;
    }
    if (!geom.sameCluster(b.src, b.dst)) {
      const std::uint64_t i = *b.support.minElement();
      return (unbounded(Point{b.src, i}, Point{b.dst, toU(toS(i) + b.offset)},
                        "pair across unglued clusters"),
              res);
    }
    const std::uint64_t off = geom.offsetOf(b.src) + geom.offsetOf(b.dst);
    if (!b.support.isFinite()) {
      const std::uint64_t i =
          farParam(b.support, 110 + toU(b.offset < 0 ? -b.offset : b.offset));
      return (unbounded(Point{b.src, i}, Point{b.dst, toU(toS(i) + b.offset)},
                        "cross-ray pairs drift apart"),
              res);
    }
    for (std::uint64_t i : b.support.enumerate(*b.support.maxElement()))
      note(i + toU(toS(i) + b.offset) + off);
  }

  for (const Rect& r : s.concrete.rects()) {
    const auto farSide = [&](const PointSet& side) -> std::optional<Point> {
      for (const auto& [id, slice] : side.raySlices())
        if (!slice.isFinite()) {
          const Point other = *(&side == &r.left ? r.right : r.left).anyElement();
          return Point{id, farParam(slice, 120 + other.index)};
        }
      return std::nullopt;
    };
    if (const auto fx = farSide(r.left)) {
      return (unbounded(*fx, *r.right.anyElement(), "unbounded rectangle side"), res);
    }
    if (const auto fy = farSide(r.right)) {
      return (unbounded(*r.left.anyElement(), *fy, "unbounded rectangle side"), res);
    }
    const auto allOf = [](const PointSet& side) {
      std::uint64_t bound = 0;
      for (const auto& [id, slice] : side.raySlices())
        bound = std::max(bound, *slice.maxElement());
      return side.enumerate(bound);
    };
    for (const Point& x : allOf(r.left)) {
      for (const Point& y : allOf(r.right)) {
        const auto d = geom.distance(x, y);
        if (!d) return (unbounded(x, y, "pair across unglued clusters"), res);
        note(*d);
      }
    }
  }

  for (const ShearPiece& sh : s.shears) {
    const std::uint64_t clearance =
        110 + toU(sh.b1 < 0 ? -sh.b1 : sh.b1) + toU(sh.b2 < 0 ? -sh.b2 : sh.b2);
    const std::uint64_t i = farParam(sh.support, clearance);
    return (unbounded(Point{sh.r1, toU(toS(sh.a1) * toS(i) + sh.b1)},
                      Point{sh.r2, toU(toS(sh.a2) * toS(i) + sh.b2)},
                      "sheared pairs drift apart"),
            res);
  }
  return res;
}

WidthResult pairWidthBound(const EAMap& f, const EAMap& g, const Relation& F,
                           const MetricGeom& geom) {
  return symWidthBound(pairImage(f, g, F), geom);
}

LocalProperness locallyProperFor(const EAMap& f, const Relation& F) {
  LocalProperness out;
  out.setWitness = imageSetImproperness(pairImage(f, f, F));
  out.restrictionWitness = restrictionImproperness(f, f, F);
  out.in = !out.setWitness && !out.restrictionWitness;
  return out;
}

}  // namespace crs
