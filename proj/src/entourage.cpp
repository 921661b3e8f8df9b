#include "crs/entourage.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "crs/errors.hpp"

namespace crs {

namespace {

// Uniform view of one component's slice of a point set: ray slices are the
// stored ultimately periodic sets, a point component contributes {0} when
// present.
UPSet sliceOf(const PointSet& ps, const Component& c) {
  if (c.kind == CompKind::Ray) return ps.ray(c.id);
  return ps.ptMember(c.id) ? UPSet::single(0) : UPSet::empty();
}

}  // namespace

void Relation::requireSameSpace(const Relation& o) const {
  if (!(space_ == o.space_))
    throw SpaceMismatch("relations live over different spaces: " + space_.toString() +
                        " vs " + o.space_.toString());
}

void Relation::normalize() {
  // Validate and clip bands.
  std::map<std::tuple<std::string, std::string, std::int64_t>, UPSet> merged;
  for (Band& b : bands_) {
    if (space_.kindOf(b.src) != CompKind::Ray || space_.kindOf(b.dst) != CompKind::Ray)
      throw InvalidArgument("band endpoints must be ray components");
    UPSet supp = b.support;
    if (b.offset < 0)
      supp = supp.intersect(UPSet::fromIndex(static_cast<std::uint64_t>(-b.offset)));
    if (supp.isEmpty()) continue;
    auto key = std::make_tuple(b.src, b.dst, b.offset);
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(key, supp);
    else
      it->second = it->second.unite(supp);
  }

  std::vector<Rect> keptRects;
  for (Rect& r : rects_) {
    if (!(r.left.space() == space_) || !(r.right.space() == space_))
      throw SpaceMismatch("rectangle sides must live over the relation's space");
    if (r.left.isEmpty() || r.right.isEmpty()) continue;
    // A 1x1 rectangle between ray points is a one-element band.
    if (r.left.isFinite() && r.right.isFinite() && r.left.finiteSize() == 1 &&
        r.right.finiteSize() == 1) {
      const Point x = *r.left.anyElement();
      const Point y = *r.right.anyElement();
      if (space_.kindOf(x.comp) == CompKind::Ray &&
          space_.kindOf(y.comp) == CompKind::Ray) {
        const std::int64_t off =
            static_cast<std::int64_t>(y.index) - static_cast<std::int64_t>(x.index);
        auto key = std::make_tuple(x.comp, y.comp, off);
        auto it = merged.find(key);
        if (it == merged.end())
          merged.emplace(key, UPSet::single(x.index));
        else
          it->second = it->second.unite(UPSet::single(x.index));
        continue;
      }
    }
    keptRects.push_back(std::move(r));
  }

  bands_.clear();
  for (auto& [key, supp] : merged)
    bands_.push_back(Band{std::get<0>(key), std::get<1>(key), std::get<2>(key), supp});
  std::sort(keptRects.begin(), keptRects.end());
  keptRects.erase(std::unique(keptRects.begin(), keptRects.end()), keptRects.end());
  rects_ = std::move(keptRects);
}

Relation Relation::make(Space sp, std::vector<Band> bands, std::vector<Rect> rects) {
  Relation r(std::move(sp));
  r.bands_ = std::move(bands);
  r.rects_ = std::move(rects);
  r.normalize();
  return r;
}

Relation Relation::band(const Space& sp, const std::string& src, const std::string& dst,
                        std::int64_t offset, const UPSet& support) {
  return make(sp, {Band{src, dst, offset, support}}, {});
}

Relation Relation::rect(const PointSet& left, const PointSet& right) {
  return make(left.space(), {}, {Rect{left, right}});
}

Relation Relation::localUnit(const PointSet& s) {
  std::vector<Band> bands;
  std::vector<Rect> rects;
  for (const auto& c : s.space().components()) {
    if (c.kind == CompKind::Ray) {
      if (!s.ray(c.id).isEmpty()) bands.push_back(Band{c.id, c.id, 0, s.ray(c.id)});
    } else if (s.ptMember(c.id)) {
      PointSet one = PointSet::ofPoints(s.space(), {{c.id, 0}});
      rects.push_back(Rect{one, one});
    }
  }
  return make(s.space(), std::move(bands), std::move(rects));
}

Relation Relation::fullUnit(const Space& sp) { return localUnit(PointSet::full(sp)); }

Relation Relation::singlePair(const Space& sp, const Point& x, const Point& y) {
  return rect(PointSet::ofPoints(sp, {x}), PointSet::ofPoints(sp, {y}));
}

bool Relation::memberPair(const Point& x, const Point& y) const {
  for (const Band& b : bands_) {
    if (b.src != x.comp || b.dst != y.comp) continue;
    const std::int64_t img = static_cast<std::int64_t>(x.index) + b.offset;
    if (img >= 0 && static_cast<std::uint64_t>(img) == y.index &&
        b.support.contains(x.index))
      return true;
  }
  for (const Rect& r : rects_)
    if (r.left.contains(x) && r.right.contains(y)) return true;
  return false;
}

bool Relation::isFinite() const {
  for (const Band& b : bands_)
    if (!b.support.isFinite()) return false;
  for (const Rect& r : rects_)
    if (!r.left.isFinite() || !r.right.isFinite()) return false;
  return true;
}

Relation Relation::unite(const Relation& o) const {
  requireSameSpace(o);
  std::vector<Band> bands = bands_;
  bands.insert(bands.end(), o.bands_.begin(), o.bands_.end());
  std::vector<Rect> rects = rects_;
  rects.insert(rects.end(), o.rects_.begin(), o.rects_.end());
  return make(space_, std::move(bands), std::move(rects));
}

Relation Relation::compose(const Relation& o) const {
  requireSameSpace(o);
  std::vector<Band> bands;
  std::vector<Rect> rects;

  for (const Band& a : bands_) {
    for (const Band& b : o.bands_) {
      if (a.dst != b.src) continue;
      bands.push_back(
          Band{a.src, b.dst, a.offset + b.offset,
               a.support.intersect(b.support.shift(-a.offset))});
    }
    for (const Rect& r : o.rects_) {
      // Middles are the band images landing inside the rectangle's left side.
      const UPSet mids = sliceOf(r.left, {a.dst, space_.kindOf(a.dst)});
      const UPSet srcs = a.support.intersect(mids.shift(-a.offset));
      if (!srcs.isEmpty())
        rects.push_back(Rect{PointSet::ofRay(space_, a.src, srcs), r.right});
    }
  }
  for (const Rect& r : rects_) {
    for (const Band& b : o.bands_) {
      const UPSet mids = sliceOf(r.right, {b.src, space_.kindOf(b.src)});
      const UPSet ends = mids.intersect(b.support).shift(b.offset);
      if (!ends.isEmpty())
        rects.push_back(Rect{r.left, PointSet::ofRay(space_, b.dst, ends)});
    }
    for (const Rect& r2 : o.rects_) {
      if (!r.right.intersect(r2.left).isEmpty()) rects.push_back(Rect{r.left, r2.right});
    }
  }
  return make(space_, std::move(bands), std::move(rects));
}

Relation Relation::transpose() const {
  std::vector<Band> bands;
  std::vector<Rect> rects;
  for (const Band& b : bands_)
    bands.push_back(Band{b.dst, b.src, -b.offset, b.support.shift(b.offset)});
  for (const Rect& r : rects_) rects.push_back(Rect{r.right, r.left});
  return make(space_, std::move(bands), std::move(rects));
}

Relation Relation::intersectRect(const PointSet& l, const PointSet& r) const {
  std::vector<Band> bands;
  std::vector<Rect> rects;
  for (const Band& b : bands_) {
    UPSet supp = b.support.intersect(l.ray(b.src)).intersect(r.ray(b.dst).shift(-b.offset));
    if (!supp.isEmpty()) bands.push_back(Band{b.src, b.dst, b.offset, supp});
  }
  for (const Rect& rc : rects_) {
    PointSet nl = rc.left.intersect(l), nr = rc.right.intersect(r);
    if (!nl.isEmpty() && !nr.isEmpty()) rects.push_back(Rect{nl, nr});
  }
  return make(space_, std::move(bands), std::move(rects));
}

Relation Relation::restrict(const PointSet& s) const { return intersectRect(s, s); }

PointSet Relation::leftSupport() const {
  PointSet out(space_);
  for (const Band& b : bands_)
    out = out.unite(PointSet::ofRay(space_, b.src, b.support));
  for (const Rect& r : rects_) out = out.unite(r.left);
  return out;
}

PointSet Relation::rightSupport() const {
  PointSet out(space_);
  for (const Band& b : bands_)
    out = out.unite(PointSet::ofRay(space_, b.dst, b.support.shift(b.offset)));
  for (const Rect& r : rects_) out = out.unite(r.right);
  return out;
}

PointSet Relation::leftNbhd(const PointSet& s) const {
  return compose(Relation::localUnit(s)).leftSupport();
}

PointSet Relation::rightNbhd(const PointSet& s) const {
  return Relation::localUnit(s).compose(*this).rightSupport();
}

namespace {

// Pairs covering machinery for the rectangle part of subset testing.
struct SigClass {
  UPSet part;                    // subset of the right slice
  std::vector<std::size_t> tau;  // indices of covering rectangles containing it
};

}  // namespace

std::optional<std::pair<Point, Point>> Relation::subsetWitness(const Relation& o) const {
  requireSameSpace(o);

  // Bands: a band pair can only be covered by an equal-offset band or by a
  // rectangle.
  for (const Band& b : bands_) {
    UPSet residual = b.support;
    for (const Band& c : o.bands_)
      if (c.src == b.src && c.dst == b.dst && c.offset == b.offset)
        residual = residual.difference(c.support);
    if (residual.isEmpty()) continue;
    for (const Rect& r : o.rects_) {
      const UPSet cap =
          r.left.ray(b.src).intersect(r.right.ray(b.dst).shift(-b.offset));
      residual = residual.difference(cap);
      if (residual.isEmpty()) break;
    }
    if (auto i = residual.minElement()) {
      const std::uint64_t j = static_cast<std::uint64_t>(
          static_cast<std::int64_t>(*i) + b.offset);
      return std::make_pair(Point{b.src, *i}, Point{b.dst, j});
    }
  }

  // Rectangles, blockwise per component pair.
  for (const Rect& rc : rects_) {
    for (const auto& c1 : space_.components()) {
      const UPSet s1 = sliceOf(rc.left, c1);
      if (s1.isEmpty()) continue;
      for (const auto& c2 : space_.components()) {
        const UPSet s2 = sliceOf(rc.right, c2);
        if (s2.isEmpty()) continue;

        // Covering rectangles restricted to this block.
        std::vector<std::pair<UPSet, UPSet>> cov;
        for (const Rect& r : o.rects_) {
          UPSet l = sliceOf(r.left, c1), rr = sliceOf(r.right, c2);
          if (!l.isEmpty() && !rr.isEmpty()) cov.push_back({l, rr});
        }
        // Covering bands (rays only).
        std::vector<std::pair<std::int64_t, UPSet>> covB;
        if (c1.kind == CompKind::Ray && c2.kind == CompKind::Ray)
          for (const Band& b : o.bands_)
            if (b.src == c1.id && b.dst == c2.id) covB.push_back({b.offset, b.support});

        auto mkPair = [&](std::uint64_t xi, std::uint64_t yi) {
          return std::make_pair(Point{c1.id, xi}, Point{c2.id, yi});
        };
        auto bandCoverOfColumn = [&](std::uint64_t y) {
          // X positions covered by bands for a fixed right index y.
          UPSet cover = UPSet::empty();
          for (const auto& [k, A] : covB) {
            const std::int64_t x = static_cast<std::int64_t>(y) - k;
            if (x >= 0 && A.contains(static_cast<std::uint64_t>(x)))
              cover = cover.unite(UPSet::single(static_cast<std::uint64_t>(x)));
          }
          return cover;
        };
        auto bandCoverOfRow = [&](std::uint64_t x) {
          UPSet cover = UPSet::empty();
          for (const auto& [k, A] : covB) {
            const std::int64_t y = static_cast<std::int64_t>(x) + k;
            if (y >= 0 && A.contains(x))
              cover = cover.unite(UPSet::single(static_cast<std::uint64_t>(y)));
          }
          return cover;
        };

        // Partition the right slice into signature classes: atoms of the
        // boolean algebra generated by the covering rectangles' right sides.
        std::vector<SigClass> classes{{s2, {}}};
        for (std::size_t j = 0; j < cov.size(); ++j) {
          std::vector<SigClass> next;
          for (auto& cl : classes) {
            UPSet inPart = cl.part.intersect(cov[j].second);
            UPSet outPart = cl.part.difference(cov[j].second);
            if (!inPart.isEmpty()) {
              SigClass c2n{inPart, cl.tau};
              c2n.tau.push_back(j);
              next.push_back(std::move(c2n));
            }
            if (!outPart.isEmpty()) next.push_back(SigClass{outPart, cl.tau});
          }
          classes = std::move(next);
        }

        for (const auto& cl : classes) {
          UPSet resL = s1;
          for (std::size_t j : cl.tau) resL = resL.difference(cov[j].first);
          if (resL.isEmpty()) continue;

          if (cl.part.isFinite()) {
            for (std::uint64_t y : cl.part.enumerate(cl.part.maxElement().value())) {
              UPSet resX = resL.difference(bandCoverOfColumn(y));
              if (auto x = resX.minElement()) return mkPair(*x, y);
            }
          } else if (!resL.isFinite()) {
            // Both sides infinite: only finitely many band offsets can
            // cover a fixed row, so skip past them.
            const std::uint64_t x0 = resL.minElement().value();
            UPSet resY = cl.part.difference(bandCoverOfRow(x0));
            return mkPair(x0, resY.minElement().value());
          } else {
            for (std::uint64_t x : resL.enumerate(resL.maxElement().value())) {
              UPSet resY = cl.part.difference(bandCoverOfRow(x));
              if (auto y = resY.minElement()) return mkPair(x, *y);
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

bool Relation::sameSetAs(const Relation& o) const {
  return subsetOf(o) && o.subsetOf(*this);
}

std::optional<ImproperWitness> Relation::impropernessWitness() const {
  for (const Rect& r : rects_) {
    // An infinite left side means the second projection has an infinite
    // fiber over any right element, and symmetrically.
    if (!r.left.isFinite()) return ImproperWitness{*r.right.anyElement(), 2};
    if (!r.right.isFinite()) return ImproperWitness{*r.left.anyElement(), 1};
  }
  return std::nullopt;
}

PointSet Relation::fiberOver(const Point& x) const {
  PointSet out(space_);
  for (const Band& b : bands_) {
    if (b.src != x.comp || !b.support.contains(x.index)) continue;
    const std::int64_t j = static_cast<std::int64_t>(x.index) + b.offset;
    if (j >= 0) out = out.withPoint({b.dst, static_cast<std::uint64_t>(j)});
  }
  for (const Rect& r : rects_)
    if (r.left.contains(x)) out = out.unite(r.right);
  return out;
}

PointSet Relation::cofiberOver(const Point& y) const {
  PointSet out(space_);
  for (const Band& b : bands_) {
    if (b.dst != y.comp) continue;
    const std::int64_t i = static_cast<std::int64_t>(y.index) - b.offset;
    if (i >= 0 && b.support.contains(static_cast<std::uint64_t>(i)))
      out = out.withPoint({b.src, static_cast<std::uint64_t>(i)});
  }
  for (const Rect& r : rects_)
    if (r.right.contains(y)) out = out.unite(r.left);
  return out;
}

std::string Relation::toString() const {
  std::ostringstream os;
  os << "rel{";
  bool first = true;
  for (const Band& b : bands_) {
    if (!first) os << " + ";
    os << "band(" << b.src << "->" << b.dst << ", k=" << b.offset
       << ", " << b.support.toString() << ")";
    first = false;
  }
  for (const Rect& r : rects_) {
    if (!first) os << " + ";
    os << "rect(" << r.left.toString() << " x " << r.right.toString() << ")";
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace crs
