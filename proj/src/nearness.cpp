#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crs/errors.hpp"
#include "crs/structures.hpp"
#include "structures_internal.hpp"

namespace crs {

namespace {

using detail::Supply;

std::optional<std::uint64_t> minOpt(std::optional<std::uint64_t> a, std::uint64_t b) {
    if (!a || b < *a) return b;
    return a;
}

UPSet dilate(const UPSet& s, std::uint64_t r) {
    UPSet out = s;
    for (std::uint64_t k = 1; k <= r; ++k)
        out = out.unite(s.shift(static_cast<std::int64_t>(k)))
                  .unite(s.shift(-static_cast<std::int64_t>(k)));
    return out;
}

// Full slices of every component whose cluster meets s.
PointSet clusterRegion(const MetricGeom& g, const PointSet& s) {
    const Space& sp = g.space();
    std::vector<bool> meets(g.clusters().size(), false);
    for (const auto& [id, slice] : s.raySlices())
        if (!slice.isEmpty()) meets[g.clusterOf(id)] = true;
    for (const auto& id : s.ptMembers()) meets[g.clusterOf(id)] = true;
    PointSet out = PointSet::empty(sp);
    for (const Component& c : sp.components()) {
        if (!meets[g.clusterOf(c.id)]) continue;
        if (c.kind == CompKind::Ray) out = out.withRay(c.id, UPSet::all());
        else out = out.withPoint(Point{c.id, 0});
    }
    return out;
}

std::uint64_t paramWindow(const StructurePtr& d, const PointSet& a, const PointSet& b) {
    detail::ParamBound p = detail::structureParams(d);
    p.absorb(detail::pointSetParams(a));
    p.absorb(detail::pointSetParams(b));
    return p.reach + p.period + 2;
}

// Is there an infinite T' ⊆ t with sup-distance to y finite? Eventually
// periodic slices make a single dilation test sufficient.
bool infiniteNearSlice(const MetricGeom&, const PointSet& t, const PointSet& y,
                       std::uint64_t window) {
    for (const auto& [id, slice] : t.raySlices()) {
        if (slice.isEmpty()) continue;
        UPSet close = slice.intersect(dilate(y.ray(id), window));
        if (!close.isFinite()) return true;
    }
    return false;
}

}  // namespace

// ===========================================================================
// Metric helpers
// ===========================================================================

PointSet ballAround(const MetricGeom& g, const PointSet& s, std::uint64_t r) {
    const Space& sp = g.space();
    PointSet out = PointSet::empty(sp);
    auto addRay = [&](const std::string& id, const UPSet& add) {
        if (!add.isEmpty()) out = out.withRay(id, out.ray(id).unite(add));
    };
    // Same-component dilation.
    for (const auto& [id, slice] : s.raySlices()) addRay(id, dilate(slice, r));
    for (const auto& id : s.ptMembers()) out = out.withPoint(Point{id, 0});
    // Cross-component, within a cluster: d((c',j),(c,i)) = (j+off') + (i+off).
    auto spread = [&](const std::string& srcId, std::uint64_t minIdx) {
        for (const Component& c : sp.components()) {
            if (c.id == srcId || !g.sameCluster(c.id, srcId)) continue;
            const std::int64_t avail = static_cast<std::int64_t>(r) -
                                       static_cast<std::int64_t>(g.offsetOf(srcId)) -
                                       static_cast<std::int64_t>(g.offsetOf(c.id)) -
                                       static_cast<std::int64_t>(minIdx);
            if (avail < 0) continue;
            if (c.kind == CompKind::Ray)
                addRay(c.id, UPSet::range(0, static_cast<std::uint64_t>(avail)));
            else
                out = out.withPoint(Point{c.id, 0});
        }
    };
    for (const auto& [id, slice] : s.raySlices())
        if (auto m = slice.minElement()) spread(id, *m);
    for (const auto& id : s.ptMembers()) spread(id, 0);
    return out;
}

std::optional<std::uint64_t> supPointSetDistance(const MetricGeom& g, const PointSet& s,
                                                 const PointSet& t) {
    if (s.isEmpty()) return 0;
    if (t.isEmpty()) return std::nullopt;
    const Space& sp = g.space();
    auto pointDist = [&](const Point& x) -> std::optional<std::uint64_t> {
        std::optional<std::uint64_t> best;
        if (sp.isRay(x.comp)) {
            const UPSet slice = t.ray(x.comp);
            if (auto j = slice.nextMember(x.index)) best = minOpt(best, *j - x.index);
            if (auto j = slice.prevMember(x.index)) best = minOpt(best, x.index - *j);
        } else if (t.ptMember(x.comp)) {
            best = 0;
        }
        auto cross = [&](const std::string& id, std::uint64_t minIdx) {
            if (id == x.comp || !g.sameCluster(id, x.comp)) return;
            best = minOpt(best, (x.index + g.offsetOf(x.comp)) + (minIdx + g.offsetOf(id)));
        };
        for (const auto& [id, slice] : t.raySlices())
            if (auto m = slice.minElement()) cross(id, *m);
        for (const auto& id : t.ptMembers()) cross(id, 0);
        return best;
    };
    std::uint64_t sup = 0;
    auto feed = [&](const Point& x) -> bool {
        auto d = pointDist(x);
        if (!d) return false;
        sup = std::max(sup, *d);
        return true;
    };
    for (const auto& id : s.ptMembers())
        if (!feed(Point{id, 0})) return std::nullopt;
    for (const auto& [id, slice] : s.raySlices()) {
        if (slice.isEmpty()) continue;
        if (slice.isFinite()) {
            for (std::uint64_t i : slice.enumerate(*slice.maxElement()))
                if (!feed(Point{id, i})) return std::nullopt;
        } else {
            // Distances to other components grow with the index, so the tail
            // must be served by the same-ray slice of t.
            auto td = tailDistance(slice, t.ray(id));
            if (!td) return std::nullopt;
            sup = std::max(sup, td->bound);
            for (std::uint64_t i : td->exceptions)
                if (!feed(Point{id, i})) return std::nullopt;
        }
    }
    return sup;
}

// ===========================================================================
// Capability sets and supply
// ===========================================================================

namespace detail {

PointSet capSet(const StructurePtr& d) {
    if (!d) throw InvalidArgument("capSet: null structure");
    const Space& sp = d->space();
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal:
        case StructureDescr::Kind::Metric:
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialConnected:
        case StructureDescr::Kind::InitialUnital:
        case StructureDescr::Kind::InitialConnectedUnital:
        case StructureDescr::Kind::Connected: return PointSet::full(sp);
        case StructureDescr::Kind::Subspace: return capSet(d->parent()).intersect(d->set());
        case StructureDescr::Kind::Termination: return capSet(d->parent());
        case StructureDescr::Kind::Coproduct: {
            PointSet out = PointSet::empty(sp);
            for (const auto& s : d->summands())
                out = out.unite(transplantPointSet(capSet(s), sp));
            return out;
        }
        default: {
            // Per component: { x : (x, x) connected in d }, via the exact
            // trajectory machinery (an under-approximation for Join trees).
            PointSet out = PointSet::empty(sp);
            for (const Component& c : sp.components()) {
                if (c.kind == CompKind::Ray) {
                    Trajectory u = Trajectory::affine(c.id, 1, 0);
                    UPSet slice = connectedIndexSet(d, u, u, UPSet::all());
                    if (!slice.isEmpty()) out = out.withRay(c.id, slice);
                } else if (connectedPts(d, Point{c.id, 0}, Point{c.id, 0}).in()) {
                    out = out.withPoint(Point{c.id, 0});
                }
            }
            return out;
        }
    }
}

Supply unitSupply(const StructurePtr& d, const PointSet& t) {
    Supply out;
    if (t.isEmpty()) return out;
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal:
        case StructureDescr::Kind::Metric:
        case StructureDescr::Kind::InitialUnital:
        case StructureDescr::Kind::InitialConnectedUnital:
            out.some = true;
            out.infinite = !t.isFinite();
            return out;
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialConnected:
            out.some = true;
            out.infinite = false;
            return out;
        case StructureDescr::Kind::Connected: {
            Supply p = unitSupply(d->parent(), t);
            out.some = true;  // singletons trim away
            out.infinite = p.infinite;
            out.known = p.known;
            return out;
        }
        case StructureDescr::Kind::Subspace:
            return unitSupply(d->parent(), t.intersect(d->set()));
        case StructureDescr::Kind::Termination: return unitSupply(d->parent(), t);
        case StructureDescr::Kind::Ideal: {
            const StructurePtr& p = d->parent();
            if (p->kind() == StructureDescr::Kind::Metric) {
                const MetricGeom& g = p->geom();
                out.some = !t.intersect(clusterRegion(g, d->set())).isEmpty();
                out.infinite =
                    infiniteNearSlice(g, t, d->set(), paramWindow(d, t, d->set()));
                return out;
            }
            if (p->kind() == StructureDescr::Kind::Terminal) {
                out.some = !d->set().isEmpty();
                out.infinite = !t.isFinite() && !d->set().isFinite();
                return out;
            }
            PointSet tc = t.intersect(capSet(d));
            out.some = !tc.isEmpty();
            out.infinite = false;  // decisive approximation for exotic parents
            return out;
        }
        case StructureDescr::Kind::Quotient: {
            const StructurePtr& p = d->parent();
            Supply ps = unitSupply(p, t);
            out.some = ps.some || !t.intersect(capSet(d)).isEmpty();
            out.infinite = ps.infinite;
            out.known = ps.known;
            if (!out.infinite && p->kind() == StructureDescr::Kind::Metric)
                out.infinite = infiniteNearSlice(p->geom(), t, d->set(),
                                                 paramWindow(d, t, d->set()));
            return out;
        }
        case StructureDescr::Kind::Pullback:
        case StructureDescr::Kind::EqPullback: {
            PointSet tc = t.intersect(capSet(d));
            out.some = !tc.isEmpty();
            // Constant ray tails only ever contribute finite unital pieces.
            PointSet aff = tc;
            for (const Component& c : d->space().components()) {
                if (c.kind != CompKind::Ray) continue;
                const RayRule& rr = d->mapF().rayRule(c.id);
                if (std::holds_alternative<ConstTail>(rr.tail))
                    aff = aff.withRay(c.id, aff.ray(c.id).intersect(
                                                UPSet::range(0, rr.table.size())));
            }
            if (aff.isFinite()) {
                out.infinite = false;
                return out;
            }
            Supply p = unitSupply(d->parent(), d->mapF().imageSet(aff));
            out.infinite = p.infinite;
            out.known = p.known;
            return out;
        }
        case StructureDescr::Kind::Join: {
            Supply p = unitSupply(d->parent(), t);
            out.some = p.some || !t.intersect(capSet(d)).isEmpty();
            out.infinite = p.infinite;
            out.known = p.known;
            return out;
        }
        case StructureDescr::Kind::Coproduct: {
            for (const auto& s : d->summands()) {
                PointSet ts = PointSet::empty(s->space());
                for (const Component& c : s->space().components()) {
                    if (c.kind == CompKind::Ray) ts = ts.withRay(c.id, t.ray(c.id));
                    else if (t.ptMember(c.id)) ts = ts.withPoint(Point{c.id, 0});
                }
                Supply ss = unitSupply(s, ts);
                out.some = out.some || ss.some;
                out.infinite = out.infinite || ss.infinite;
                out.known = out.known && ss.known;
            }
            return out;
        }
        case StructureDescr::Kind::Meet: {
            PointSet tc = t.intersect(capSet(d));
            out.some = !tc.isEmpty();
            Supply a = unitSupply(d->parent(), tc);
            Supply b = unitSupply(d->parent2(), tc);
            out.infinite = a.infinite && b.infinite;  // approximation
            out.known = a.known && b.known;
            return out;
        }
    }
    return out;
}

Supply nearSupply(const StructurePtr& d, const PointSet& t, const PointSet& s) {
    Supply out;
    if (t.isEmpty() || s.isEmpty()) return out;
    switch (d->kind()) {
        case StructureDescr::Kind::Metric: {
            const MetricGeom& g = d->geom();
            out.some = !t.intersect(clusterRegion(g, s)).isEmpty();
            out.infinite = infiniteNearSlice(g, t, s, paramWindow(d, t, s));
            return out;
        }
        case StructureDescr::Kind::Terminal:
            out.some = true;
            out.infinite = !t.isFinite() && !s.isFinite();
            return out;
        default:
            out.some = nearSupport(d, PointSet::ofPoints(d->space(), {*t.anyElement()}), s).in();
            out.infinite = false;  // decisive approximation
            return out;
    }
}

}  // namespace detail

// ===========================================================================
// Nearness of supports
// ===========================================================================

namespace {

Verdict nearMetric(const MetricGeom& g, const PointSet& s, const PointSet& t) {
    if (auto r = supPointSetDistance(g, s, t))
        return Verdict::yes("bounded-distance", {{"distance", *r}});
    return Verdict::no("unbounded-distance");
}

Verdict nearQuotientMetric(const StructurePtr& d, const PointSet& s, const PointSet& t) {
    const MetricGeom& g = d->parent()->geom();
    const PointSet& y = d->set();
    if (auto r1 = supPointSetDistance(g, s, t))
        return Verdict::yes("bounded-distance", {{"distance", *r1}});
    auto rstar = supPointSetDistance(g, s, t.unite(y));
    if (!rstar) return Verdict::no("far-from-target-and-glued");
    // Points beyond R* of t must route through the glued set; they are near y.
    PointSet sFar = s.difference(ballAround(g, t, *rstar));
    if (sFar.isFinite()) {
        if (t.intersect(clusterRegion(g, y)).isEmpty())
            return Verdict::no("no-glued-target");
        return Verdict::yes("via-glued-set", {{"distance", *rstar}});
    }
    if (infiniteNearSlice(g, t, y, paramWindow(d, t.unite(s), y)))
        return Verdict::yes("via-glued-set", {{"distance", *rstar}});
    return Verdict::no("no-glued-supply");
}

}  // namespace

Verdict nearSupport(const StructurePtr& d, const PointSet& s, const PointSet& t) {
    if (!d) throw InvalidArgument("nearSupport: null structure");
    if (s.space() != d->space() || t.space() != d->space())
        throw SpaceMismatch("nearSupport: sets over a different space");
    if (s.isEmpty()) return Verdict::yes("empty-source", {{"distance", 0}});
    if (t.isEmpty()) return Verdict::no("empty-target");
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal: {
            if (s.isFinite() || !t.isFinite()) return Verdict::yes("proper-cover");
            return Verdict::no("finite-target", {{"source", "infinite"}});
        }
        case StructureDescr::Kind::Metric: return nearMetric(d->geom(), s, t);
        case StructureDescr::Kind::Initial: {
            if (auto w = s.subsetWitness(t))
                return Verdict::no("outside-target", {{"point", w->toString()}});
            if (!s.isFinite()) return Verdict::no("infinite-source");
            return Verdict::yes("finite-subset");
        }
        case StructureDescr::Kind::InitialConnected: {
            if (!s.isFinite()) return Verdict::no("infinite-source");
            return Verdict::yes("finite-cover");
        }
        case StructureDescr::Kind::InitialUnital: {
            if (auto w = s.subsetWitness(t))
                return Verdict::no("outside-target", {{"point", w->toString()}});
            return Verdict::yes("unit-cover");
        }
        case StructureDescr::Kind::InitialConnectedUnital: {
            if (!s.difference(t).isFinite()) return Verdict::no("infinitely-outside-target");
            return Verdict::yes("unit-plus-finite-cover");
        }
        case StructureDescr::Kind::Subspace: {
            if (auto w = s.subsetWitness(d->set()))
                return Verdict::no("outside-subspace", {{"point", w->toString()}});
            return nearSupport(d->parent(), s, t.intersect(d->set()));
        }
        case StructureDescr::Kind::Pullback: {
            const EAMap& f = d->mapF();
            for (const auto& [id, slice] : s.raySlices()) {
                if (slice.isEmpty() || slice.isFinite()) continue;
                if (std::holds_alternative<ConstTail>(f.rayRule(id).tail))
                    return Verdict::no("collapsed-source-tail", {{"ray", id}});
            }
            return nearSupport(d->parent(), f.imageSet(s), f.imageSet(t));
        }
        case StructureDescr::Kind::EqPullback: {
            auto via = [&](const EAMap& h) -> Verdict {
                for (const auto& [id, slice] : s.raySlices()) {
                    if (slice.isEmpty() || slice.isFinite()) continue;
                    if (std::holds_alternative<ConstTail>(h.rayRule(id).tail))
                        return Verdict::no("collapsed-source-tail", {{"ray", id}});
                }
                return nearSupport(d->parent(), h.imageSet(s), h.imageSet(t));
            };
            return allOf({via(d->mapF()), via(d->mapG())}, "eq-pullback-near");
        }
        case StructureDescr::Kind::Termination: {
            Verdict unital = unitalSubspace(d->parent(), s);
            if (!unital.in()) return unital;
            Supply supply = detail::unitSupply(d->parent(), t);
            if (!supply.known) return Verdict::dontKnow(1, "unit-supply-undecided");
            if (!s.isFinite() && !supply.infinite)
                return Verdict::no("insufficient-unit-supply");
            if (!supply.some) return Verdict::no("no-unit-supply");
            return Verdict::yes("unital-cover");
        }
        case StructureDescr::Kind::Ideal: {
            // Triangle rule: S is served from T by a member near the ideal
            // set iff S is near T and S is near the ideal set.
            Verdict a = nearSupport(d->parent(), s, t);
            Verdict b = nearSupport(d->parent(), s, d->set());
            return allOf({std::move(a), std::move(b)}, "ideal-near");
        }
        case StructureDescr::Kind::Quotient: {
            if (d->parent()->kind() == StructureDescr::Kind::Metric)
                return nearQuotientMetric(d, s, t);
            Verdict direct = nearSupport(d->parent(), s, t);
            if (direct.in()) return direct;
            Verdict nearY = nearSupport(d->parent(), s, d->set());
            if (nearY.in()) {
                Supply sup = detail::nearSupply(d->parent(), t, d->set());
                if (!sup.known) return Verdict::dontKnow(1, "glued-supply-undecided");
                const bool ok = s.isFinite() ? sup.some : sup.infinite;
                if (ok) return Verdict::yes("via-glued-set");
                return Verdict::no("no-glued-supply");
            }
            if (direct.unknown()) return direct;
            if (nearY.unknown()) return nearY;
            return Verdict::no("far-from-target-and-glued");
        }
        case StructureDescr::Kind::Join: {
            Verdict pv = nearSupport(d->parent(), s, t);
            if (pv.in()) return pv;
            // Bounded search: does some cover expression reach s from t?
            detail::ParamBound pb = detail::structureParams(d);
            pb.absorb(detail::pointSetParams(s));
            pb.absorb(detail::pointSetParams(t));
            std::vector<Relation> gens = d->joinGens();
            for (const Relation& g : generators(d->parent(), pb.reach + 2))
                gens.push_back(g);
            Relation base = Relation::empty(d->space());
            for (const Relation& g : gens) base = base.unite(g).unite(g.transpose());
            Relation m = base;
            for (std::uint64_t depth = 1; depth <= d->joinDepth(); ++depth) {
                if (depth > 1) m = m.unite(m.compose(base));
                if (!s.subsetWitness(m.leftNbhd(t)))
                    return Verdict::yes("join-cover-near", {{"depth", depth}});
                if (m.pieceCount() > 4000) break;
            }
            return Verdict::dontKnow(d->joinDepth(), "join-near-exhausted");
        }
        case StructureDescr::Kind::Connected: {
            const std::uint64_t w = paramWindow(d, s, t);
            PointSet sTail = PointSet::empty(d->space());
            for (const auto& [id, slice] : s.raySlices()) {
                UPSet tail = slice.intersect(UPSet::fromIndex(w));
                if (!tail.isEmpty()) sTail = sTail.withRay(id, tail);
            }
            Verdict tailNear = nearSupport(d->parent(), sTail, t);
            if (!tailNear.in()) return tailNear;
            return Verdict::yes("tail-near", {{"window", w}});
        }
        case StructureDescr::Kind::Coproduct: {
            std::vector<Verdict> parts;
            for (const auto& sub : d->summands()) {
                PointSet ss = PointSet::empty(sub->space());
                PointSet ts = PointSet::empty(sub->space());
                for (const Component& c : sub->space().components()) {
                    if (c.kind == CompKind::Ray) {
                        ss = ss.withRay(c.id, s.ray(c.id));
                        ts = ts.withRay(c.id, t.ray(c.id));
                    } else {
                        if (s.ptMember(c.id)) ss = ss.withPoint(Point{c.id, 0});
                        if (t.ptMember(c.id)) ts = ts.withPoint(Point{c.id, 0});
                    }
                }
                if (ss.isEmpty()) continue;
                parts.push_back(nearSupport(sub, ss, ts));
            }
            return allOf(parts, "summand-near");
        }
        case StructureDescr::Kind::Meet: {
            Verdict a = nearSupport(d->parent(), s, t);
            Verdict b = nearSupport(d->parent2(), s, t);
            return allOf({std::move(a), std::move(b)}, "meet-near");
        }
    }
    throw InvalidArgument("nearSupport: unhandled kind");
}

}  // namespace crs
