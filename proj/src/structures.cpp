#include "crs/structures.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crs/errors.hpp"
#include "structures_internal.hpp"

namespace crs {

namespace {

using detail::Supply;

std::uint64_t asU64(std::int64_t v) { return static_cast<std::uint64_t>(v); }

std::int64_t legValue(std::uint64_t a, std::int64_t b, std::uint64_t i) {
    return static_cast<std::int64_t>(a) * static_cast<std::int64_t>(i) + b;
}

// Least i with a·i + b >= w.
std::uint64_t firstIndexAtLeast(std::uint64_t a, std::int64_t b, std::uint64_t w) {
    const std::int64_t need = static_cast<std::int64_t>(w) - b;
    if (need <= 0) return 0;
    const std::int64_t aa = static_cast<std::int64_t>(a);
    return static_cast<std::uint64_t>((need + aa - 1) / aa);
}

void requireSpace(const StructurePtr& d, const Space& sp, const char* what) {
    if (!d) throw InvalidArgument(std::string(what) + ": null structure");
    if (d->space() != sp) throw SpaceMismatch(std::string(what) + ": different ground spaces");
}

}  // namespace

// ===========================================================================
// StructureDescr
// ===========================================================================

const MetricGeom& StructureDescr::geom() const {
    if (!geom_) throw InvalidArgument("structure has no geometry");
    return *geom_;
}
const StructurePtr& StructureDescr::parent() const {
    if (!parent_) throw InvalidArgument("structure has no parent");
    return parent_;
}
const StructurePtr& StructureDescr::parent2() const {
    if (!parent2_) throw InvalidArgument("structure has no second parent");
    return parent2_;
}
const PointSet& StructureDescr::set() const { return set_; }
const EAMap& StructureDescr::mapF() const {
    if (!f_) throw InvalidArgument("structure has no map");
    return *f_;
}
const EAMap& StructureDescr::mapG() const {
    if (!g_) throw InvalidArgument("structure has no second map");
    return *g_;
}
const std::vector<Relation>& StructureDescr::joinGens() const { return joinGens_; }
std::uint64_t StructureDescr::joinDepth() const { return joinDepth_; }
const std::vector<StructurePtr>& StructureDescr::summands() const { return summands_; }

StructurePtr StructureDescr::terminal(Space sp) {
    StructureDescr d;
    d.kind_ = Kind::Terminal;
    d.space_ = std::move(sp);
    d.set_ = PointSet::empty(d.space_);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::metric(MetricGeom geom) {
    StructureDescr d;
    d.kind_ = Kind::Metric;
    d.space_ = geom.space();
    d.set_ = PointSet::empty(d.space_);
    d.geom_ = std::move(geom);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::metricDiscrete(const Space& sp) {
    return metric(MetricGeom::discrete(sp));
}

namespace {
// Only static members of StructureDescr can reach the private constructor;
// the atoms share this shape.
}  // namespace

StructurePtr StructureDescr::initial(Space sp) {
    StructureDescr d;
    d.kind_ = Kind::Initial;
    d.space_ = std::move(sp);
    d.set_ = PointSet::empty(d.space_);
    return StructurePtr(new StructureDescr(std::move(d)));
}
StructurePtr StructureDescr::initialConnected(Space sp) {
    StructureDescr d;
    d.kind_ = Kind::InitialConnected;
    d.space_ = std::move(sp);
    d.set_ = PointSet::empty(d.space_);
    return StructurePtr(new StructureDescr(std::move(d)));
}
StructurePtr StructureDescr::initialUnital(Space sp) {
    StructureDescr d;
    d.kind_ = Kind::InitialUnital;
    d.space_ = std::move(sp);
    d.set_ = PointSet::empty(d.space_);
    return StructurePtr(new StructureDescr(std::move(d)));
}
StructurePtr StructureDescr::initialConnectedUnital(Space sp) {
    StructureDescr d;
    d.kind_ = Kind::InitialConnectedUnital;
    d.space_ = std::move(sp);
    d.set_ = PointSet::empty(d.space_);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::subspace(StructurePtr parent, PointSet s) {
    if (!parent) throw InvalidArgument("subspace: null parent");
    if (s.space() != parent->space()) throw SpaceMismatch("subspace: set over a different space");
    StructureDescr d;
    d.kind_ = Kind::Subspace;
    d.space_ = parent->space();
    d.parent_ = std::move(parent);
    d.set_ = std::move(s);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::pullback(EAMap f, StructurePtr parent) {
    if (!parent) throw InvalidArgument("pullback: null parent");
    if (f.target() != parent->space()) throw SpaceMismatch("pullback: map target != parent space");
    StructureDescr d;
    d.kind_ = Kind::Pullback;
    d.space_ = f.source();
    d.set_ = PointSet::empty(d.space_);
    d.parent_ = std::move(parent);
    d.f_ = std::move(f);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::eqPullback(EAMap f, EAMap g, StructurePtr parent) {
    if (!parent) throw InvalidArgument("eq-pullback: null parent");
    if (f.source() != g.source()) throw SpaceMismatch("eq-pullback: different sources");
    if (f.target() != parent->space() || g.target() != parent->space())
        throw SpaceMismatch("eq-pullback: map target != parent space");
    StructureDescr d;
    d.kind_ = Kind::EqPullback;
    d.space_ = f.source();
    d.set_ = PointSet::empty(d.space_);
    d.parent_ = std::move(parent);
    d.f_ = std::move(f);
    d.g_ = std::move(g);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::termination(StructurePtr parent) {
    if (!parent) throw InvalidArgument("termination: null parent");
    StructureDescr d;
    d.kind_ = Kind::Termination;
    d.space_ = parent->space();
    d.set_ = PointSet::empty(d.space_);
    d.parent_ = std::move(parent);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::ideal(StructurePtr parent, PointSet s) {
    if (!parent) throw InvalidArgument("ideal: null parent");
    if (s.space() != parent->space()) throw SpaceMismatch("ideal: set over a different space");
    StructureDescr d;
    d.kind_ = Kind::Ideal;
    d.space_ = parent->space();
    d.parent_ = std::move(parent);
    d.set_ = std::move(s);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::quotient(StructurePtr parent, PointSet y) {
    if (!parent) throw InvalidArgument("quotient: null parent");
    if (y.space() != parent->space()) throw SpaceMismatch("quotient: set over a different space");
    Verdict unit = contains(parent, Relation::localUnit(y));
    if (!unit.in())
        throw NotUnitalSubspace("quotient: the collapsed set does not carry its unit (" +
                                unit.stateName() + ")");
    StructureDescr d;
    d.kind_ = Kind::Quotient;
    d.space_ = parent->space();
    d.parent_ = std::move(parent);
    d.set_ = std::move(y);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::join(StructurePtr parent, std::vector<Relation> gens,
                                  std::uint64_t depth) {
    if (!parent) throw InvalidArgument("join: null parent");
    for (const Relation& g : gens)
        if (g.space() != parent->space()) throw SpaceMismatch("join: generator over a different space");
    StructureDescr d;
    d.kind_ = Kind::Join;
    d.space_ = parent->space();
    d.set_ = PointSet::empty(d.space_);
    d.parent_ = std::move(parent);
    d.joinGens_ = std::move(gens);
    d.joinDepth_ = std::max<std::uint64_t>(1, depth);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::connected(StructurePtr parent) {
    if (!parent) throw InvalidArgument("connected: null parent");
    StructureDescr d;
    d.kind_ = Kind::Connected;
    d.space_ = parent->space();
    d.set_ = PointSet::empty(d.space_);
    d.parent_ = std::move(parent);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::coproductOf(std::vector<StructurePtr> summands) {
    for (const auto& s : summands)
        if (!s) throw InvalidArgument("coproduct: null summand");
    if (summands.empty()) return initial(Space::make({}));
    if (summands.size() == 1) return summands.front();
    std::vector<Component> comps;
    std::set<std::string> seen;
    for (const auto& s : summands)
        for (const Component& c : s->space().components()) {
            if (!seen.insert(c.id).second)
                throw InvalidArgument("coproduct: duplicate component id " + c.id);
            comps.push_back(c);
        }
    StructureDescr d;
    d.kind_ = Kind::Coproduct;
    d.space_ = Space::make(std::move(comps));
    d.set_ = PointSet::empty(d.space_);
    d.summands_ = std::move(summands);
    return StructurePtr(new StructureDescr(std::move(d)));
}

StructurePtr StructureDescr::meet(StructurePtr a, StructurePtr b) {
    if (!a || !b) throw InvalidArgument("meet: null operand");
    if (a->space() != b->space()) throw SpaceMismatch("meet: operands over different spaces");
    StructureDescr d;
    d.kind_ = Kind::Meet;
    d.space_ = a->space();
    d.set_ = PointSet::empty(d.space_);
    d.parent_ = std::move(a);
    d.parent2_ = std::move(b);
    return StructurePtr(new StructureDescr(std::move(d)));
}

bool StructureDescr::sameShape(const StructureDescr& o) const {
    if (kind_ != o.kind_ || space_ != o.space_ || geom_ != o.geom_ || set_ != o.set_ ||
        f_ != o.f_ || g_ != o.g_ || joinGens_ != o.joinGens_ || joinDepth_ != o.joinDepth_)
        return false;
    auto eq = [](const StructurePtr& a, const StructurePtr& b) {
        if (!a || !b) return !a && !b;
        return a->sameShape(*b);
    };
    if (!eq(parent_, o.parent_) || !eq(parent2_, o.parent2_)) return false;
    if (summands_.size() != o.summands_.size()) return false;
    for (std::size_t i = 0; i < summands_.size(); ++i)
        if (!eq(summands_[i], o.summands_[i])) return false;
    return true;
}

std::string StructureDescr::kindName() const {
    switch (kind_) {
        case Kind::Terminal: return "terminal";
        case Kind::Metric: return "metric";
        case Kind::Initial: return "initial";
        case Kind::InitialConnected: return "initial-connected";
        case Kind::InitialUnital: return "initial-unital";
        case Kind::InitialConnectedUnital: return "initial-connected-unital";
        case Kind::Subspace: return "subspace";
        case Kind::Pullback: return "pullback";
        case Kind::EqPullback: return "eq-pullback";
        case Kind::Termination: return "termination";
        case Kind::Ideal: return "ideal";
        case Kind::Quotient: return "quotient";
        case Kind::Join: return "join";
        case Kind::Connected: return "connected";
        case Kind::Coproduct: return "coproduct";
        case Kind::Meet: return "meet";
    }
    return "?";
}

std::string StructureDescr::toString() const {
    std::ostringstream os;
    os << kindName();
    switch (kind_) {
        case Kind::Metric: os << "(" << geom_->toString() << ")"; break;
        case Kind::Subspace:
        case Kind::Ideal:
        case Kind::Quotient:
            os << "(" << parent_->toString() << ", " << set_.toString() << ")";
            break;
        case Kind::Pullback: os << "(" << f_->toString() << ", " << parent_->toString() << ")"; break;
        case Kind::EqPullback:
            os << "(" << f_->toString() << ", " << g_->toString() << ", " << parent_->toString()
               << ")";
            break;
        case Kind::Termination:
        case Kind::Connected: os << "(" << parent_->toString() << ")"; break;
        case Kind::Join: {
            os << "(" << parent_->toString() << "; ";
            for (std::size_t i = 0; i < joinGens_.size(); ++i)
                os << (i ? ", " : "") << joinGens_[i].toString();
            os << "; depth " << joinDepth_ << ")";
            break;
        }
        case Kind::Coproduct: {
            os << "(";
            for (std::size_t i = 0; i < summands_.size(); ++i)
                os << (i ? " + " : "") << summands_[i]->toString();
            os << ")";
            break;
        }
        case Kind::Meet:
            os << "(" << parent_->toString() << ", " << parent2_->toString() << ")";
            break;
        default: os << "(" << space_.toString() << ")"; break;
    }
    return os.str();
}

bool sameStructureShape(const StructurePtr& a, const StructurePtr& b) {
    if (!a || !b) return !a && !b;
    return a->sameShape(*b);
}

// ===========================================================================
// detail helpers
// ===========================================================================

namespace detail {

void ParamBound::absorb(const ParamBound& o) {
    reach = std::max(reach, o.reach);
    period = lcmU64(period, o.period);
    if (period > 2520) period = 2520;  // cap: lcm(1..9)
}
void ParamBound::absorbReach(std::uint64_t r) { reach = std::max(reach, r); }
void ParamBound::absorbPeriod(std::uint64_t p) {
    if (p == 0) p = 1;
    period = lcmU64(period, p);
    if (period > 2520) period = 2520;
}

ParamBound upsetParams(const UPSet& u) {
    ParamBound b;
    b.absorbReach(u.threshold());
    if (!u.prefix().empty()) b.absorbReach(u.prefix().back() + 1);
    b.absorbPeriod(u.period());
    return b;
}

ParamBound pointSetParams(const PointSet& s) {
    ParamBound b;
    for (const auto& [id, slice] : s.raySlices()) b.absorb(upsetParams(slice));
    return b;
}

ParamBound relationParams(const Relation& e) {
    ParamBound b;
    for (const Band& bd : e.bands()) {
        b.absorb(upsetParams(bd.support));
        b.absorbReach(static_cast<std::uint64_t>(bd.offset < 0 ? -bd.offset : bd.offset));
    }
    for (const Rect& r : e.rects()) {
        b.absorb(pointSetParams(r.left));
        b.absorb(pointSetParams(r.right));
    }
    return b;
}

ParamBound symParams(const SymRelation& s) {
    ParamBound b = relationParams(s.concrete);
    for (const ShearPiece& sh : s.shears) {
        b.absorb(upsetParams(sh.support));
        b.absorbReach(static_cast<std::uint64_t>(sh.b1 < 0 ? -sh.b1 : sh.b1));
        b.absorbReach(static_cast<std::uint64_t>(sh.b2 < 0 ? -sh.b2 : sh.b2));
        b.absorbReach(sh.a1 + sh.a2);
    }
    return b;
}

ParamBound mapParams(const EAMap& f) {
    ParamBound b;
    for (const Component& c : f.source().components()) {
        if (c.kind != CompKind::Ray) continue;
        const RayRule& rr = f.rayRule(c.id);
        b.absorbReach(rr.table.size());
        for (const Point& p : rr.table) b.absorbReach(p.index + 1);
        if (const auto* at = std::get_if<AffineTail>(&rr.tail)) {
            b.absorbReach(at->a);
            b.absorbReach(static_cast<std::uint64_t>(at->b < 0 ? -at->b : at->b));
        } else if (const auto* ct = std::get_if<ConstTail>(&rr.tail)) {
            b.absorbReach(ct->value.index + 1);
        }
    }
    return b;
}

ParamBound structureParams(const StructurePtr& d) {
    ParamBound b;
    if (!d) return b;
    b.absorb(pointSetParams(d->set()));
    switch (d->kind()) {
        case StructureDescr::Kind::Metric:
            for (const auto& cl : d->geom().clusters())
                for (const auto& [id, off] : cl) b.absorbReach(off);
            break;
        case StructureDescr::Kind::Pullback: b.absorb(mapParams(d->mapF())); break;
        case StructureDescr::Kind::EqPullback:
            b.absorb(mapParams(d->mapF()));
            b.absorb(mapParams(d->mapG()));
            break;
        case StructureDescr::Kind::Join:
            for (const Relation& g : d->joinGens()) b.absorb(relationParams(g));
            break;
        case StructureDescr::Kind::Coproduct:
            for (const auto& s : d->summands()) b.absorb(structureParams(s));
            break;
        default: break;
    }
    switch (d->kind()) {
        case StructureDescr::Kind::Subspace:
        case StructureDescr::Kind::Pullback:
        case StructureDescr::Kind::EqPullback:
        case StructureDescr::Kind::Termination:
        case StructureDescr::Kind::Ideal:
        case StructureDescr::Kind::Quotient:
        case StructureDescr::Kind::Join:
        case StructureDescr::Kind::Connected:
            b.absorb(structureParams(d->parent()));
            break;
        case StructureDescr::Kind::Meet:
            b.absorb(structureParams(d->parent()));
            b.absorb(structureParams(d->parent2()));
            break;
        default: break;
    }
    return b;
}

std::uint64_t stableWindow(const StructurePtr& d, const SymRelation& s) {
    ParamBound b = structureParams(d);
    b.absorb(symParams(s));
    return b.reach + b.period + 2;
}

SymRelation trimSym(const SymRelation& s, std::uint64_t window) {
    std::vector<Band> bands;
    std::vector<Rect> rects;
    for (const Band& b : s.concrete.bands()) {
        const std::uint64_t from =
            b.offset >= 0 ? window : window + static_cast<std::uint64_t>(-b.offset);
        UPSet sup = b.support.intersect(UPSet::fromIndex(from));
        if (!sup.isEmpty()) bands.push_back({b.src, b.dst, b.offset, sup});
    }
    for (const Rect& r : s.concrete.rects()) {
        // A rectangle with both sides finite is a finite perturbation and can be
        // dropped outright.  One with an infinite side cannot be erased by any
        // finite deletion, so it must be kept intact for the parent to judge.
        if (r.left.isFinite() && r.right.isFinite()) continue;
        rects.push_back(r);
    }
    SymRelation out{s.space, Relation::make(s.space, std::move(bands), std::move(rects)), {}};
    for (const ShearPiece& sh : s.shears) {
        const std::uint64_t i0 = std::max(firstIndexAtLeast(sh.a1, sh.b1, window),
                                          firstIndexAtLeast(sh.a2, sh.b2, window));
        UPSet sup = sh.support.intersect(UPSet::fromIndex(i0));
        if (sup.isEmpty()) continue;
        ShearPiece t = sh;
        t.support = sup;
        out.shears.push_back(std::move(t));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> compGraph(const StructurePtr& d) {
    std::vector<std::pair<std::string, std::string>> edges;
    auto complete = [&]() {
        const auto& cs = d->space().components();
        for (std::size_t i = 0; i < cs.size(); ++i)
            for (std::size_t j = i + 1; j < cs.size(); ++j)
                edges.push_back({cs[i].id, cs[j].id});
    };
    switch (d->kind()) {
        case StructureDescr::Kind::Metric: {
            for (const auto& cl : d->geom().clusters()) {
                std::vector<std::string> ids;
                for (const auto& [id, off] : cl) ids.push_back(id);
                for (std::size_t i = 0; i < ids.size(); ++i)
                    for (std::size_t j = i + 1; j < ids.size(); ++j)
                        edges.push_back({ids[i], ids[j]});
            }
            break;
        }
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialUnital: break;  // diagonal only
        case StructureDescr::Kind::Subspace:
        case StructureDescr::Kind::Ideal: return compGraph(d->parent());
        case StructureDescr::Kind::Coproduct:
            for (const auto& s : d->summands())
                for (auto& e : compGraph(s)) edges.push_back(std::move(e));
            break;
        case StructureDescr::Kind::Join: {
            edges = compGraph(d->parent());
            for (const Relation& g : d->joinGens()) {
                for (const Band& b : g.bands())
                    if (!b.support.isEmpty()) edges.push_back({b.src, b.dst});
                for (const Rect& r : g.rects()) {
                    std::vector<std::string> ls, rs;
                    for (const auto& [id, sl] : r.left.raySlices()) ls.push_back(id);
                    for (const auto& id : r.left.ptMembers()) ls.push_back(id);
                    for (const auto& [id, sl] : r.right.raySlices()) rs.push_back(id);
                    for (const auto& id : r.right.ptMembers()) rs.push_back(id);
                    for (const auto& a : ls)
                        for (const auto& b2 : rs) edges.push_back({a, b2});
                }
            }
            break;
        }
        default: complete(); break;
    }
    return edges;
}

std::vector<std::vector<std::string>> closeCompGraph(
    const Space& sp, std::vector<std::pair<std::string, std::string>> edges) {
    std::map<std::string, std::string> up;
    for (const Component& c : sp.components()) up[c.id] = c.id;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        return up.at(x) == x ? x : (up[x] = find(up.at(x)));
    };
    for (const auto& [a, b] : edges) {
        if (!sp.has(a) || !sp.has(b)) continue;
        up[find(a)] = find(b);
    }
    std::map<std::string, std::vector<std::string>> cls;
    for (const Component& c : sp.components()) cls[find(c.id)].push_back(c.id);
    std::vector<std::vector<std::string>> out;
    for (auto& [root, ids] : cls) out.push_back(std::move(ids));
    return out;
}

std::uint64_t maxAbsOffsetSym(const SymRelation& s) {
    std::uint64_t m = 0;
    for (const Band& b : s.concrete.bands())
        m = std::max(m, static_cast<std::uint64_t>(b.offset < 0 ? -b.offset : b.offset));
    for (const ShearPiece& sh : s.shears) {
        m = std::max(m, static_cast<std::uint64_t>(sh.b1 < 0 ? -sh.b1 : sh.b1));
        m = std::max(m, static_cast<std::uint64_t>(sh.b2 < 0 ? -sh.b2 : sh.b2));
    }
    return m;
}

PointSet transplantPointSet(const PointSet& s, const Space& sp) {
    PointSet out = PointSet::empty(sp);
    for (const auto& [id, slice] : s.raySlices()) out = out.withRay(id, slice);
    for (const auto& id : s.ptMembers()) out = out.withPoint(Point{id, 0});
    return out;
}

Relation transplantRelation(const Relation& e, const Space& sp) {
    std::vector<Band> bands = e.bands();
    std::vector<Rect> rects;
    for (const Rect& r : e.rects())
        rects.push_back({transplantPointSet(r.left, sp), transplantPointSet(r.right, sp)});
    return Relation::make(sp, std::move(bands), std::move(rects));
}

std::optional<std::uint64_t> shearOffDiagIndex(const ShearPiece& p) {
    auto first = p.support.minElement();
    if (!first) return std::nullopt;
    if (p.r1 != p.r2) return first;
    // Same ray: legs agree at no more than one index since the slopes differ.
    const std::int64_t da = static_cast<std::int64_t>(p.a1) - static_cast<std::int64_t>(p.a2);
    const std::int64_t rhs = p.b2 - p.b1;
    std::optional<std::uint64_t> equalAt;
    if (da != 0 && rhs % da == 0 && rhs / da >= 0) equalAt = asU64(rhs / da);
    if (!equalAt || *first != *equalAt) return first;
    return p.support.nextMember(*first + 1);
}

std::optional<std::pair<Point, Point>> restrictionImpropernessSym(const EAMap& f, const EAMap& g,
                                                                  const SymRelation& s) {
    if (auto w = restrictionImproperness(f, g, s.concrete)) return w;
    for (const ShearPiece& sh : s.shears) {
        const RayRule& rf = f.rayRule(sh.r1);
        const RayRule& rg = g.rayRule(sh.r2);
        const auto* cf = std::get_if<ConstTail>(&rf.tail);
        const auto* cg = std::get_if<ConstTail>(&rg.tail);
        if (cf && cg) return std::pair<Point, Point>{cf->value, cg->value};
    }
    return std::nullopt;
}

}  // namespace detail

// ===========================================================================
// Trajectories
// ===========================================================================

Trajectory Trajectory::constant(Point p) {
    Trajectory t;
    t.isConst = true;
    t.value = std::move(p);
    return t;
}

Trajectory Trajectory::affine(std::string ray, std::uint64_t a, std::int64_t b) {
    if (a == 0) throw InvalidArgument("trajectory slope must be >= 1");
    Trajectory t;
    t.isConst = false;
    t.ray = std::move(ray);
    t.a = a;
    t.b = b;
    return t;
}

Point Trajectory::at(std::uint64_t i) const {
    if (isConst) return value;
    return Point{ray, asU64(legValue(a, b, i))};
}

std::uint64_t Trajectory::firstValid() const {
    if (isConst) return 0;
    return firstIndexAtLeast(a, b, 0);
}

UPSet trajMemberSet(const PointSet& s, const Trajectory& u, const UPSet& domain) {
    UPSet valid = domain.intersect(UPSet::fromIndex(u.firstValid()));
    if (u.isConst) return s.contains(u.value) ? valid : UPSet::empty();
    return s.ray(u.ray).affinePreimage(u.a, u.b).intersect(valid);
}

namespace {

// Solutions of  a1·i + b1 + k == a2·i + b2  within `dom`.
UPSet linearSolutions(std::uint64_t a1, std::int64_t b1, std::int64_t k, std::uint64_t a2,
                      std::int64_t b2, const UPSet& dom) {
    const std::int64_t da = static_cast<std::int64_t>(a2) - static_cast<std::int64_t>(a1);
    const std::int64_t rhs = b1 + k - b2;
    if (da == 0) return rhs == 0 ? dom : UPSet::empty();
    if (rhs % da != 0) return UPSet::empty();
    const std::int64_t i = rhs / da;
    if (i < 0) return UPSet::empty();
    return dom.contains(asU64(i)) ? UPSet::single(asU64(i)) : UPSet::empty();
}

}  // namespace

UPSet trajPairMemberSet(const Relation& r, const Trajectory& u, const Trajectory& v,
                        const UPSet& domain) {
    UPSet valid =
        domain.intersect(UPSet::fromIndex(std::max(u.firstValid(), v.firstValid())));
    if (valid.isEmpty()) return UPSet::empty();
    UPSet out = UPSet::empty();
    for (const Band& b : r.bands()) {
        if (u.isConst && v.isConst) {
            if (r.memberPair(u.value, v.value)) return valid;
            continue;
        }
        if (!u.isConst && !v.isConst) {
            if (u.ray != b.src || v.ray != b.dst) continue;
            UPSet sol = linearSolutions(u.a, u.b, b.offset, v.a, v.b, valid);
            UPSet inSup = b.support.affinePreimage(u.a, u.b);
            out = out.unite(sol.intersect(inSup));
        } else if (u.isConst) {
            if (u.value.comp != b.src || v.ray != b.dst) continue;
            if (!b.support.contains(u.value.index)) continue;
            // v(i) == u.index + offset
            UPSet sol = linearSolutions(0, static_cast<std::int64_t>(u.value.index), b.offset,
                                        v.a, v.b, valid);
            out = out.unite(sol);
        } else {
            if (u.ray != b.src || v.value.comp != b.dst) continue;
            // u(i) + offset == v.index  and  u(i) ∈ support
            UPSet sol = linearSolutions(u.a, u.b, b.offset, 0,
                                        static_cast<std::int64_t>(v.value.index), valid);
            UPSet inSup = b.support.affinePreimage(u.a, u.b);
            out = out.unite(sol.intersect(inSup));
        }
    }
    for (const Rect& rc : r.rects()) {
        UPSet l = trajMemberSet(rc.left, u, valid);
        UPSet rr = trajMemberSet(rc.right, v, valid);
        out = out.unite(l.intersect(rr));
    }
    return out.intersect(valid);
}

namespace {

// Exact decomposition of h∘u over `domain` into (part, trajectory) pieces.
std::vector<std::pair<UPSet, Trajectory>> composeTraj(const EAMap& h, const Trajectory& u,
                                                      const UPSet& domain) {
    std::vector<std::pair<UPSet, Trajectory>> out;
    UPSet valid = domain.intersect(UPSet::fromIndex(u.firstValid()));
    if (valid.isEmpty()) return out;
    if (u.isConst) {
        out.push_back({valid, Trajectory::constant(h.apply(u.value))});
        return out;
    }
    const RayRule& rr = h.rayRule(u.ray);
    const std::uint64_t m = rr.table.size();
    // Table region: u(i) < m.
    if (m > 0) {
        const std::uint64_t iEnd = firstIndexAtLeast(u.a, u.b, m);  // first i with u(i) >= m
        if (iEnd > 0) {
            for (std::uint64_t i : valid.enumerate(iEnd - 1)) {
                const std::int64_t val = legValue(u.a, u.b, i);
                if (val < 0 || asU64(val) >= m) continue;
                out.push_back({UPSet::single(i), Trajectory::constant(rr.table[asU64(val)])});
            }
        }
    }
    const std::uint64_t i0 = firstIndexAtLeast(u.a, u.b, m);
    UPSet tailDom = valid.intersect(UPSet::fromIndex(i0));
    if (!tailDom.isEmpty()) {
        if (const auto* at = std::get_if<AffineTail>(&rr.tail)) {
            const std::uint64_t a = at->a * u.a;
            const std::int64_t b =
                static_cast<std::int64_t>(at->a) * u.b + at->b;
            out.push_back({tailDom, Trajectory::affine(at->dstRay, a, b)});
        } else {
            const auto* ct = std::get_if<ConstTail>(&rr.tail);
            out.push_back({tailDom, Trajectory::constant(ct->value)});
        }
    }
    return out;
}

UPSet pulledConnIdx(const StructurePtr& p, const EAMap& h1, const EAMap& h2, const Trajectory& u,
                    const Trajectory& v, const UPSet& domain) {
    UPSet out = UPSet::empty();
    for (const auto& [du, tu] : composeTraj(h1, u, domain))
        for (const auto& [dv, tv] : composeTraj(h2, v, domain)) {
            UPSet common = du.intersect(dv);
            if (common.isEmpty()) continue;
            out = out.unite(connectedIndexSet(p, tu, tv, common));
        }
    return out;
}

// { i ∈ domain : u(i) is near `s` in the nearness sense of d }. Exact for
// metric and terminal descriptors; component-granular elsewhere.
UPSet nearTrajSet(const StructurePtr& d, const Trajectory& u, const PointSet& s,
                  const UPSet& domain) {
    UPSet valid = domain.intersect(UPSet::fromIndex(u.firstValid()));
    if (valid.isEmpty()) return UPSet::empty();
    if (s.isEmpty()) return UPSet::empty();
    switch (d->kind()) {
        case StructureDescr::Kind::Metric: {
            const MetricGeom& g = d->geom();
            const std::string comp = u.isConst ? u.value.comp : u.ray;
            for (const auto& [id, slice] : s.raySlices())
                if (g.sameCluster(comp, id)) return valid;
            for (const auto& id : s.ptMembers())
                if (g.sameCluster(comp, id)) return valid;
            return UPSet::empty();
        }
        case StructureDescr::Kind::Terminal:
            return valid;  // a single point is near any nonempty set
        default: {
            const std::string comp = u.isConst ? u.value.comp : u.ray;
            PointSet slice = d->space().isRay(comp)
                                 ? PointSet::ofRay(d->space(), comp, UPSet::all())
                                 : PointSet::empty(d->space()).withPoint(Point{comp, 0});
            return nearSupport(d, slice, s).in() ? valid : UPSet::empty();
        }
    }
}

Relation joinCover(const StructurePtr& d, std::uint64_t reach, bool* blewUp);

}  // namespace

UPSet connectedIndexSet(const StructurePtr& d, const Trajectory& u, const Trajectory& v,
                        const UPSet& domain) {
    if (!d) throw InvalidArgument("connectedIndexSet: null structure");
    UPSet valid =
        domain.intersect(UPSet::fromIndex(std::max(u.firstValid(), v.firstValid())));
    if (valid.isEmpty()) return UPSet::empty();
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal:
        case StructureDescr::Kind::InitialConnected:
        case StructureDescr::Kind::InitialConnectedUnital:
        case StructureDescr::Kind::Connected: return valid;
        case StructureDescr::Kind::Metric: {
            const std::string cu = u.isConst ? u.value.comp : u.ray;
            const std::string cv = v.isConst ? v.value.comp : v.ray;
            return d->geom().sameCluster(cu, cv) ? valid : UPSet::empty();
        }
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialUnital: {
            // Equality set of the two trajectories.
            if (u.isConst && v.isConst) return u.value == v.value ? valid : UPSet::empty();
            if (!u.isConst && !v.isConst) {
                if (u.ray != v.ray) return UPSet::empty();
                return linearSolutions(u.a, u.b, 0, v.a, v.b, valid);
            }
            const Trajectory& cst = u.isConst ? u : v;
            const Trajectory& aff = u.isConst ? v : u;
            if (cst.value.comp != aff.ray) return UPSet::empty();
            return linearSolutions(aff.a, aff.b, 0, 0,
                                   static_cast<std::int64_t>(cst.value.index), valid);
        }
        case StructureDescr::Kind::Subspace:
            return connectedIndexSet(d->parent(), u, v, valid)
                .intersect(trajMemberSet(d->set(), u, valid))
                .intersect(trajMemberSet(d->set(), v, valid));
        case StructureDescr::Kind::Pullback:
            return pulledConnIdx(d->parent(), d->mapF(), d->mapF(), u, v, valid);
        case StructureDescr::Kind::EqPullback: {
            UPSet ff = pulledConnIdx(d->parent(), d->mapF(), d->mapF(), u, v, valid);
            UPSet gg = pulledConnIdx(d->parent(), d->mapG(), d->mapG(), u, v, valid);
            UPSet fg = pulledConnIdx(d->parent(), d->mapF(), d->mapG(), u, v, valid);
            return ff.intersect(gg).intersect(fg);
        }
        case StructureDescr::Kind::Termination: {
            PointSet caps = detail::capSet(d->parent());
            return trajMemberSet(caps, u, valid).intersect(trajMemberSet(caps, v, valid));
        }
        case StructureDescr::Kind::Ideal:
            return connectedIndexSet(d->parent(), u, v, valid)
                .intersect(nearTrajSet(d->parent(), u, d->set(), valid))
                .intersect(nearTrajSet(d->parent(), v, d->set(), valid));
        case StructureDescr::Kind::Quotient: {
            UPSet viaParent = connectedIndexSet(d->parent(), u, v, valid);
            UPSet viaGlue = nearTrajSet(d->parent(), u, d->set(), valid)
                                .intersect(nearTrajSet(d->parent(), v, d->set(), valid));
            return viaParent.unite(viaGlue);
        }
        case StructureDescr::Kind::Join: {
            UPSet viaParent = connectedIndexSet(d->parent(), u, v, valid);
            bool blewUp = false;
            detail::ParamBound pb = detail::symParams(SymRelation{
                d->space(), Relation::empty(d->space()), {}});
            pb.absorbReach(static_cast<std::uint64_t>(u.b < 0 ? -u.b : u.b));
            pb.absorbReach(static_cast<std::uint64_t>(v.b < 0 ? -v.b : v.b));
            Relation cover = joinCover(d, pb.reach + 2, &blewUp);
            return viaParent.unite(trajPairMemberSet(cover, u, v, valid));
        }
        case StructureDescr::Kind::Coproduct: {
            const std::string cu = u.isConst ? u.value.comp : u.ray;
            const std::string cv = v.isConst ? v.value.comp : v.ray;
            for (const auto& s : d->summands())
                if (s->space().has(cu))
                    return s->space().has(cv) ? connectedIndexSet(s, u, v, valid)
                                              : UPSet::empty();
            return UPSet::empty();
        }
        case StructureDescr::Kind::Meet:
            return connectedIndexSet(d->parent(), u, v, valid)
                .intersect(connectedIndexSet(d->parent2(), u, v, valid));
    }
    return UPSet::empty();
}

// ===========================================================================
// Membership
// ===========================================================================

namespace {

struct DiagCheck {
    std::optional<std::pair<Point, Point>> offDiag;
    bool finite = true;
};

DiagCheck analyzeDiag(const SymRelation& s) {
    DiagCheck r;
    for (const Band& b : s.concrete.bands()) {
        if (b.support.isEmpty()) continue;
        if (!b.support.isFinite()) r.finite = false;
        if ((b.src != b.dst || b.offset != 0) && !r.offDiag) {
            const std::uint64_t i = *b.support.minElement();
            r.offDiag = {Point{b.src, i},
                         Point{b.dst, asU64(static_cast<std::int64_t>(i) + b.offset)}};
        }
    }
    for (const Rect& rc : s.concrete.rects()) {
        if (rc.left.isEmpty() || rc.right.isEmpty()) continue;
        if (!rc.left.isFinite() || !rc.right.isFinite()) r.finite = false;
        if (!r.offDiag) {
            Point x = *rc.left.anyElement();
            Point y = *rc.right.anyElement();
            if (!(x == y)) {
                r.offDiag = {x, y};
            } else {
                PointSet sx = PointSet::ofPoints(rc.left.space(), {x});
                if (auto x2 = rc.left.difference(sx).anyElement()) r.offDiag = {*x2, y};
                else if (auto y2 = rc.right.difference(sx).anyElement()) r.offDiag = {x, *y2};
            }
        }
    }
    for (const ShearPiece& sh : s.shears) {
        r.finite = false;
        if (!r.offDiag) {
            if (auto i = detail::shearOffDiagIndex(sh)) {
                r.offDiag = {Point{sh.r1, asU64(legValue(sh.a1, sh.b1, *i))},
                             Point{sh.r2, asU64(legValue(sh.a2, sh.b2, *i))}};
            }
        }
    }
    return r;
}

Verdict containsInitialFamily(const StructurePtr& d, const SymRelation& s) {
    const DiagCheck c = analyzeDiag(s);
    auto offOut = [&]() {
        return Verdict::no("not-diagonal").withPair(c.offDiag->first, c.offDiag->second);
    };
    switch (d->kind()) {
        case StructureDescr::Kind::Initial:
            if (c.offDiag) return offOut();
            if (!c.finite) return Verdict::no("not-finitely-supported");
            return Verdict::yes("finite-unit");
        case StructureDescr::Kind::InitialConnected:
            if (!c.finite) return Verdict::no("not-finite");
            return Verdict::yes("finite");
        case StructureDescr::Kind::InitialUnital:
            if (c.offDiag) return offOut();
            return Verdict::yes("unit");
        default: {
            // InitialConnectedUnital: every piece diagonal or finite.
            for (const Band& b : s.concrete.bands()) {
                const bool diag = (b.src == b.dst && b.offset == 0);
                if (!diag && !b.support.isFinite()) {
                    const std::uint64_t i = *b.support.minElement();
                    return Verdict::no("infinite-off-diagonal")
                        .withPair(Point{b.src, i},
                                  Point{b.dst, asU64(static_cast<std::int64_t>(i) + b.offset)});
                }
            }
            for (const Rect& rc : s.concrete.rects()) {
                if (rc.left.isEmpty() || rc.right.isEmpty()) continue;
                const bool finite = rc.left.isFinite() && rc.right.isFinite();
                const bool diag = finite && rc.left.finiteSize() == 1 && rc.left == rc.right;
                if (!finite && !diag) {
                    // An infinite rectangle side is improper anyway.
                    return Verdict::no("infinite-off-diagonal");
                }
            }
            for (const ShearPiece& sh : s.shears) {
                if (auto i = detail::shearOffDiagIndex(sh))
                    return Verdict::no("infinite-off-diagonal")
                        .withPair(Point{sh.r1, asU64(legValue(sh.a1, sh.b1, *i))},
                                  Point{sh.r2, asU64(legValue(sh.a2, sh.b2, *i))});
            }
            return Verdict::yes("unit-plus-finite");
        }
    }
}

SymRelation shearOnly(const Space& sp, const ShearPiece& sh) {
    return SymRelation{sp, Relation::empty(sp), {sh}};
}

SymRelation singleBandSym(const Space& sp, const Band& b) {
    return SymRelation::ofRelation(Relation::make(sp, {b}, {}));
}

SymRelation singleRectSym(const Space& sp, const Rect& r) {
    return SymRelation::ofRelation(Relation::make(sp, {}, {r}));
}

Verdict containsQuotient(const StructurePtr& d, const SymRelation& s) {
    if (auto w = imageSetImproperness(s)) return Verdict::no("improper").withImproper(*w);
    const StructurePtr& p = d->parent();
    const PointSet& y = d->set();
    std::vector<Verdict> parts;
    nlohmann::json pieces = nlohmann::json::array();
    auto classify = [&](const SymRelation& piece, const std::string& desc) {
        Verdict inParent = containsSym(p, piece);
        if (inParent.in()) {
            pieces.push_back({{"piece", desc}, {"mode", "parent"}});
            parts.push_back(std::move(inParent));
            return;
        }
        Verdict near = allOf({nearSupport(p, piece.leftSupport(), y),
                              nearSupport(p, piece.rightSupport(), y)},
                             "near-glued-set");
        if (near.in()) {
            pieces.push_back({{"piece", desc}, {"mode", "near"}});
            parts.push_back(std::move(near));
            return;
        }
        parts.push_back(anyOf({std::move(inParent), std::move(near)}, "piece-unplaced"));
    };
    for (const Band& b : s.concrete.bands()) {
        if (b.support.isEmpty()) continue;
        classify(singleBandSym(s.space, b), Relation::make(s.space, {b}, {}).toString());
    }
    for (const Rect& r : s.concrete.rects()) {
        if (r.left.isEmpty() || r.right.isEmpty()) continue;
        classify(singleRectSym(s.space, r), Relation::make(s.space, {}, {r}).toString());
    }
    for (const ShearPiece& sh : s.shears) classify(shearOnly(s.space, sh), sh.toString());
    Verdict all = allOf(parts, "quotient-decomposition");
    if (all.in()) all.detail["pieces"] = pieces;
    return all;
}

bool coversSym(const SymRelation& s, const Relation& m) {
    if (s.concrete.subsetWitness(m).has_value()) return false;
    for (const ShearPiece& sh : s.shears) {
        UPSet covered = trajPairMemberSet(m, Trajectory::affine(sh.r1, sh.a1, sh.b1),
                                          Trajectory::affine(sh.r2, sh.a2, sh.b2), sh.support);
        if (!sh.support.subsetOf(covered)) return false;
    }
    return true;
}

// Union of generators and their transposes used by the join search; `reach`
// bounds the offsets borrowed from the parent.
Relation joinBase(const StructurePtr& d, std::uint64_t reach, const SymRelation* query) {
    std::vector<Relation> ds = d->joinGens();
    for (const Relation& g : generators(d->parent(), reach)) ds.push_back(g);
    if (query) {
        // Pieces of the query already settled by the parent may anchor the cover.
        for (const Band& b : query->concrete.bands()) {
            Relation piece = Relation::make(query->space, {b}, {});
            if (containsSym(d->parent(), SymRelation::ofRelation(piece)).in())
                ds.push_back(std::move(piece));
        }
        for (const Rect& r : query->concrete.rects()) {
            Relation piece = Relation::make(query->space, {}, {r});
            if (containsSym(d->parent(), SymRelation::ofRelation(piece)).in())
                ds.push_back(std::move(piece));
        }
    }
    Relation base = Relation::empty(d->space());
    for (const Relation& g : ds) base = base.unite(g).unite(g.transpose());
    return base;
}

Verdict containsJoin(const StructurePtr& d, const SymRelation& s) {
    if (auto w = imageSetImproperness(s)) return Verdict::no("improper").withImproper(*w);
    Verdict pv = containsSym(d->parent(), s);
    if (pv.in()) return Verdict::yes("parent-member", {{"parent", pv.code}});
    const bool parentUnknown = pv.unknown();

    // Component-level reachability: a pair of components linked neither by the
    // parent nor by any generator can never be linked by the join.
    auto edges = detail::compGraph(d->parent());
    for (const Relation& g : d->joinGens()) {
        for (const Band& b : g.bands())
            if (!b.support.isEmpty()) edges.push_back({b.src, b.dst});
        for (const Rect& r : g.rects()) {
            std::vector<std::string> ls, rs;
            for (const auto& [id, sl] : r.left.raySlices()) ls.push_back(id);
            for (const auto& id : r.left.ptMembers()) ls.push_back(id);
            for (const auto& [id, sl] : r.right.raySlices()) rs.push_back(id);
            for (const auto& id : r.right.ptMembers()) rs.push_back(id);
            for (const auto& a : ls)
                for (const auto& b2 : rs) edges.push_back({a, b2});
        }
    }
    auto classes = detail::closeCompGraph(d->space(), std::move(edges));
    auto classOf = [&](const std::string& id) -> std::size_t {
        for (std::size_t i = 0; i < classes.size(); ++i)
            for (const auto& c : classes[i])
                if (c == id) return i;
        return classes.size();
    };
    for (const Band& b : s.concrete.bands()) {
        if (b.support.isEmpty()) continue;
        if (classOf(b.src) != classOf(b.dst)) {
            const std::uint64_t i = *b.support.minElement();
            return Verdict::no("unreachable-components")
                .withPair(Point{b.src, i},
                          Point{b.dst, asU64(static_cast<std::int64_t>(i) + b.offset)});
        }
    }
    auto firstPointIn = [&](const PointSet& ps, const std::string& comp) -> Point {
        if (ps.space().isRay(comp)) return Point{comp, *ps.ray(comp).minElement()};
        return Point{comp, 0};
    };
    for (const Rect& r : s.concrete.rects()) {
        std::vector<std::string> ls, rs;
        for (const auto& [id, sl] : r.left.raySlices()) ls.push_back(id);
        for (const auto& id : r.left.ptMembers()) ls.push_back(id);
        for (const auto& [id, sl] : r.right.raySlices()) rs.push_back(id);
        for (const auto& id : r.right.ptMembers()) rs.push_back(id);
        for (const auto& a : ls)
            for (const auto& b2 : rs)
                if (classOf(a) != classOf(b2))
                    return Verdict::no("unreachable-components")
                        .withPair(firstPointIn(r.left, a), firstPointIn(r.right, b2));
    }
    for (const ShearPiece& sh : s.shears) {
        if (classOf(sh.r1) != classOf(sh.r2)) {
            const std::uint64_t i = *sh.support.minElement();
            return Verdict::no("unreachable-components")
                .withPair(Point{sh.r1, asU64(legValue(sh.a1, sh.b1, i))},
                          Point{sh.r2, asU64(legValue(sh.a2, sh.b2, i))});
        }
    }

    // Bounded cover search: M_1 = union of generators (and transposes),
    // M_{j+1} = M_j ∪ M_j ∘ M_1.
    const std::uint64_t reach = detail::maxAbsOffsetSym(s) + 2;
    Relation base = joinBase(d, reach, &s);
    Relation m = base;
    for (std::uint64_t depth = 1; depth <= d->joinDepth(); ++depth) {
        if (depth > 1) m = m.unite(m.compose(base));
        if (coversSym(s, m))
            return Verdict::yes("join-cover", {{"depth", depth}}).withRel(m);
        if (m.pieceCount() > 4000) break;
    }
    return Verdict::dontKnow(d->joinDepth(),
                             parentUnknown ? "parent-undecided" : "join-depth-exhausted");
}

Relation joinCover(const StructurePtr& d, std::uint64_t reach, bool* blewUp) {
    Relation base = joinBase(d, reach, nullptr);
    Relation m = base;
    for (std::uint64_t depth = 2; depth <= d->joinDepth(); ++depth) {
        m = m.unite(m.compose(base));
        if (m.pieceCount() > 4000) {
            if (blewUp) *blewUp = true;
            break;
        }
    }
    return m;
}

Verdict containsCoproduct(const StructurePtr& d, const SymRelation& s) {
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < d->summands().size(); ++i)
        for (const Component& c : d->summands()[i]->space().components()) owner[c.id] = i;
    const std::size_t n = d->summands().size();
    std::vector<std::vector<Band>> bandsBy(n);
    std::vector<std::vector<Rect>> rectsBy(n);
    std::vector<std::vector<ShearPiece>> shearsBy(n);
    for (const Band& b : s.concrete.bands()) {
        if (b.support.isEmpty()) continue;
        const std::size_t i = owner.at(b.src);
        if (owner.at(b.dst) != i) {
            const std::uint64_t k = *b.support.minElement();
            return Verdict::no("cross-summand")
                .withPair(Point{b.src, k},
                          Point{b.dst, asU64(static_cast<std::int64_t>(k) + b.offset)});
        }
        bandsBy[i].push_back(b);
    }
    auto compsOf = [](const PointSet& ps) {
        std::vector<std::string> out;
        for (const auto& [id, sl] : ps.raySlices()) out.push_back(id);
        for (const auto& id : ps.ptMembers()) out.push_back(id);
        return out;
    };
    auto firstPointIn = [&](const PointSet& ps, const std::string& comp) -> Point {
        if (ps.space().isRay(comp)) return Point{comp, *ps.ray(comp).minElement()};
        return Point{comp, 0};
    };
    for (const Rect& r : s.concrete.rects()) {
        auto ls = compsOf(r.left);
        auto rs = compsOf(r.right);
        if (ls.empty() || rs.empty()) continue;
        const std::size_t i = owner.at(ls.front());
        for (const auto& a : ls)
            for (const auto& b : rs)
                if (owner.at(a) != owner.at(b))
                    return Verdict::no("cross-summand")
                        .withPair(firstPointIn(r.left, a), firstPointIn(r.right, b));
        if (owner.at(rs.front()) != i) {
            return Verdict::no("cross-summand")
                .withPair(firstPointIn(r.left, ls.front()), firstPointIn(r.right, rs.front()));
        }
        rectsBy[i].push_back(r);
    }
    for (const ShearPiece& sh : s.shears) {
        const std::size_t i = owner.at(sh.r1);
        if (owner.at(sh.r2) != i) {
            const std::uint64_t k = *sh.support.minElement();
            return Verdict::no("cross-summand")
                .withPair(Point{sh.r1, asU64(legValue(sh.a1, sh.b1, k))},
                          Point{sh.r2, asU64(legValue(sh.a2, sh.b2, k))});
        }
        shearsBy[i].push_back(sh);
    }
    std::vector<Verdict> parts;
    for (std::size_t i = 0; i < n; ++i) {
        if (bandsBy[i].empty() && rectsBy[i].empty() && shearsBy[i].empty()) continue;
        const Space& sub = d->summands()[i]->space();
        std::vector<Rect> rects;
        for (const Rect& r : rectsBy[i])
            rects.push_back({detail::transplantPointSet(r.left, sub),
                             detail::transplantPointSet(r.right, sub)});
        SymRelation local{sub, Relation::make(sub, bandsBy[i], std::move(rects)), shearsBy[i]};
        parts.push_back(containsSym(d->summands()[i], local));
    }
    return allOf(parts, "summand-local");
}

}  // namespace

Verdict containsSym(const StructurePtr& d, const SymRelation& s) {
    if (!d) throw InvalidArgument("containsSym: null structure");
    if (s.space != d->space()) throw SpaceMismatch("containsSym: relation over a different space");
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal: {
            if (auto w = imageSetImproperness(s)) return Verdict::no("improper").withImproper(*w);
            return Verdict::yes("proper");
        }
        case StructureDescr::Kind::Metric: {
            WidthResult wr = symWidthBound(s, d->geom());
            if (wr.bounded) return Verdict::yes("width-bound", {{"bound", wr.bound}});
            Verdict v = Verdict::no("width-unbounded", {{"reason", wr.reason}});
            if (wr.witness) return std::move(v).withPair(wr.witness->first, wr.witness->second);
            return v;
        }
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialConnected:
        case StructureDescr::Kind::InitialUnital:
        case StructureDescr::Kind::InitialConnectedUnital:
            return containsInitialFamily(d, s);
        case StructureDescr::Kind::Subspace: {
            if (auto w = s.leftSupport().subsetWitness(d->set()))
                return Verdict::no("support-escapes", {{"side", "left"}, {"point", w->toString()}});
            if (auto w = s.rightSupport().subsetWitness(d->set()))
                return Verdict::no("support-escapes", {{"side", "right"}, {"point", w->toString()}});
            return containsSym(d->parent(), s);
        }
        case StructureDescr::Kind::Pullback: {
            const EAMap& f = d->mapF();
            if (auto w = detail::restrictionImpropernessSym(f, f, s))
                return Verdict::no("restriction-improper",
                                   {{"target", w->first.toString() + "," + w->second.toString()}});
            Verdict pv = containsSym(d->parent(), pushPairImage(f, f, s));
            if (pv.in()) return Verdict::yes("pullback", {{"parent", pv.code}});
            if (pv.unknown()) return pv;
            return Verdict::no("image-not-member", {{"parent", pv.code}});
        }
        case StructureDescr::Kind::EqPullback: {
            const EAMap& f = d->mapF();
            const EAMap& g = d->mapG();
            if (auto w = detail::restrictionImpropernessSym(f, f, s))
                return Verdict::no("restriction-improper",
                                   {{"target", w->first.toString() + "," + w->second.toString()}});
            if (auto w = detail::restrictionImpropernessSym(g, g, s))
                return Verdict::no("restriction-improper",
                                   {{"target", w->first.toString() + "," + w->second.toString()}});
            Verdict ff = containsSym(d->parent(), pushPairImage(f, f, s));
            Verdict gg = containsSym(d->parent(), pushPairImage(g, g, s));
            Verdict fg = containsSym(d->parent(), pushPairImage(f, g, s));
            auto strip = [](Verdict v) {
                // Witnesses of the pushed images live in the target space.
                v.pairWitness.reset();
                v.improperWitness.reset();
                v.rels.clear();
                return v;
            };
            return allOf({strip(std::move(ff)), strip(std::move(gg)), strip(std::move(fg))},
                         "eq-pullback");
        }
        case StructureDescr::Kind::Termination: {
            if (auto w = imageSetImproperness(s)) return Verdict::no("improper").withImproper(*w);
            Verdict l = unitalSubspace(d->parent(), s.leftSupport());
            Verdict r = unitalSubspace(d->parent(), s.rightSupport());
            auto strip = [](Verdict v) {
                v.pairWitness.reset();
                v.improperWitness.reset();
                v.rels.clear();
                return v;
            };
            return allOf({strip(std::move(l)), strip(std::move(r))}, "termination");
        }
        case StructureDescr::Kind::Ideal: {
            Verdict pv = containsSym(d->parent(), s);
            if (pv.out() || pv.unknown()) return pv;
            Verdict ln = nearSupport(d->parent(), s.leftSupport(), d->set());
            Verdict rn = nearSupport(d->parent(), s.rightSupport(), d->set());
            return allOf({std::move(pv), std::move(ln), std::move(rn)}, "ideal");
        }
        case StructureDescr::Kind::Quotient: return containsQuotient(d, s);
        case StructureDescr::Kind::Join: return containsJoin(d, s);
        case StructureDescr::Kind::Connected: {
            const std::uint64_t w = detail::stableWindow(d->parent(), s);
            SymRelation t = detail::trimSym(s, w);
            Verdict pv = containsSym(d->parent(), t);
            if (pv.in()) return Verdict::yes("tail-member", {{"window", w}, {"parent", pv.code}});
            return pv;  // Out witnesses live in the trimmed tail, hence in s.
        }
        case StructureDescr::Kind::Coproduct: return containsCoproduct(d, s);
        case StructureDescr::Kind::Meet: {
            Verdict a = containsSym(d->parent(), s);
            Verdict b = containsSym(d->parent2(), s);
            return allOf({std::move(a), std::move(b)}, "meet");
        }
    }
    throw InvalidArgument("containsSym: unhandled kind");
}

Verdict contains(const StructurePtr& d, const Relation& e) {
    if (!d) throw InvalidArgument("contains: null structure");
    if (e.space() != d->space()) throw SpaceMismatch("contains: relation over a different space");
    return containsSym(d, SymRelation::ofRelation(e));
}

Verdict containsPair(const StructurePtr& d, const EAMap& f, const EAMap& g, const Relation& F) {
    if (!d) throw InvalidArgument("containsPair: null structure");
    if (f.target() != d->space() || g.target() != d->space())
        throw SpaceMismatch("containsPair: map target != structure space");
    if (f.source() != F.space() || g.source() != F.space())
        throw SpaceMismatch("containsPair: relation over a different source");
    return containsSym(d, pairImage(f, g, F));
}

// ===========================================================================
// Derived predicates
// ===========================================================================

Verdict isUnital(const StructurePtr& d) {
    if (!d) throw InvalidArgument("isUnital: null structure");
    return contains(d, Relation::fullUnit(d->space()));
}

Verdict unitalSubspace(const StructurePtr& d, const PointSet& s) {
    requireSpace(d, s.space(), "unitalSubspace");
    return contains(d, Relation::localUnit(s));
}

Verdict connectedPts(const StructurePtr& d, const Point& a, const Point& b) {
    if (!d) throw InvalidArgument("connectedPts: null structure");
    return contains(d, Relation::singlePair(d->space(), a, b));
}

namespace {

Point compRep(const Space& sp, const std::string& id, std::uint64_t idx = 0) {
    return Point{id, sp.isRay(id) ? idx : 0};
}

Verdict sampledConnectivity(const StructurePtr& d) {
    std::vector<Point> reps;
    for (const Component& c : d->space().components()) {
        if (c.kind == CompKind::Ray)
            for (std::uint64_t i : {0ull, 1ull, 2ull, 9ull, 10ull}) reps.push_back({c.id, i});
        else
            reps.push_back({c.id, 0});
    }
    for (std::size_t i = 0; i < reps.size(); ++i)
        for (std::size_t j = i; j < reps.size(); ++j) {
            Verdict v = connectedPts(d, reps[i], reps[j]);
            if (v.out())
                return Verdict::no("disconnected-pair").withPair(reps[i], reps[j]);
            if (v.unknown()) return v;
        }
    return Verdict::yes("sampled-connected", {{"method", "representative-sample"}});
}

}  // namespace

Verdict isConnected(const StructurePtr& d) {
    if (!d) throw InvalidArgument("isConnected: null structure");
    const Space& sp = d->space();
    if (sp.size() == 0) return Verdict::yes("empty-space");
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal: return Verdict::yes("all-pairs-proper");
        case StructureDescr::Kind::InitialConnected:
        case StructureDescr::Kind::InitialConnectedUnital: return Verdict::yes("finite-pairs");
        case StructureDescr::Kind::Connected: return Verdict::yes("finite-perturbations");
        case StructureDescr::Kind::Metric: {
            const auto& cls = d->geom().clusters();
            if (cls.size() <= 1) return Verdict::yes("single-cluster");
            const std::string c1 = cls[0].begin()->first;
            const std::string c2 = cls[1].begin()->first;
            return Verdict::no("cross-cluster").withPair(compRep(sp, c1), compRep(sp, c2));
        }
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialUnital: {
            if (sp.hasRays()) {
                const std::string r = [&] {
                    for (const Component& c : sp.components())
                        if (c.kind == CompKind::Ray) return c.id;
                    return std::string{};
                }();
                return Verdict::no("distinct-points-unlinked")
                    .withPair(Point{r, 0}, Point{r, 1});
            }
            if (sp.size() <= 1) return Verdict::yes("at-most-one-point");
            return Verdict::no("distinct-points-unlinked")
                .withPair(compRep(sp, sp.components()[0].id), compRep(sp, sp.components()[1].id));
        }
        case StructureDescr::Kind::Subspace: {
            if (d->set() == PointSet::full(sp)) return isConnected(d->parent());
            Point x = *d->set().complement().anyElement();
            return Verdict::no("missing-self-pair").withPair(x, x);
        }
        case StructureDescr::Kind::Termination: {
            PointSet caps = detail::capSet(d->parent());
            if (auto w = PointSet::full(sp).subsetWitness(caps))
                return Verdict::no("missing-self-pair").withPair(*w, *w);
            return Verdict::yes("all-points-capped");
        }
        case StructureDescr::Kind::Ideal: {
            Verdict pc = isConnected(d->parent());
            if (!pc.in()) return pc;
            Verdict nv = nearSupport(d->parent(), PointSet::full(sp), d->set());
            if (nv.in()) return Verdict::yes("connected-near-set");
            if (nv.unknown()) return nv;
            return Verdict::no("far-point", nv.detail);
        }
        case StructureDescr::Kind::Quotient: {
            if (d->set().isEmpty()) return isConnected(d->parent());
            if (d->parent()->kind() == StructureDescr::Kind::Metric) {
                const MetricGeom& g = d->parent()->geom();
                std::vector<std::string> loneReps;
                bool anyMerged = false;
                std::string mergedRep;
                for (const auto& cl : g.clusters()) {
                    bool meets = false;
                    for (const auto& [id, off] : cl) {
                        if (d->space().isRay(id) ? !d->set().ray(id).isEmpty()
                                                 : d->set().ptMember(id))
                            meets = true;
                    }
                    if (meets) {
                        anyMerged = true;
                        mergedRep = cl.begin()->first;
                    } else {
                        loneReps.push_back(cl.begin()->first);
                    }
                }
                const std::size_t effective = loneReps.size() + (anyMerged ? 1 : 0);
                if (effective <= 1) return Verdict::yes("glued-clusters");
                const std::string a = loneReps[0];
                const std::string b = anyMerged ? mergedRep : loneReps[1];
                return Verdict::no("cross-cluster").withPair(compRep(sp, a), compRep(sp, b));
            }
            Verdict pc = isConnected(d->parent());
            if (pc.in()) return pc;
            return sampledConnectivity(d);
        }
        case StructureDescr::Kind::Pullback:
        case StructureDescr::Kind::EqPullback: {
            Verdict pc = isConnected(d->parent());
            if (pc.in()) return Verdict::yes("parent-connected");
            return sampledConnectivity(d);
        }
        case StructureDescr::Kind::Join: {
            Verdict pc = isConnected(d->parent());
            if (pc.in()) return pc;
            return sampledConnectivity(d);
        }
        case StructureDescr::Kind::Coproduct: {
            std::vector<std::size_t> nonEmpty;
            for (std::size_t i = 0; i < d->summands().size(); ++i)
                if (d->summands()[i]->space().size() > 0) nonEmpty.push_back(i);
            if (nonEmpty.empty()) return Verdict::yes("empty-space");
            if (nonEmpty.size() == 1) return isConnected(d->summands()[nonEmpty[0]]);
            const std::string a = d->summands()[nonEmpty[0]]->space().components()[0].id;
            const std::string b = d->summands()[nonEmpty[1]]->space().components()[0].id;
            return Verdict::no("cross-summand").withPair(compRep(sp, a), compRep(sp, b));
        }
        case StructureDescr::Kind::Meet:
            return allOf({isConnected(d->parent()), isConnected(d->parent2())}, "meet-connected");
    }
    throw InvalidArgument("isConnected: unhandled kind");
}

// ===========================================================================
// Generators and probes
// ===========================================================================

namespace {

void pushUnique(std::vector<Relation>& out, Relation r) {
    if (r.isEmpty()) return;
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
}

std::vector<std::string> rayIds(const Space& sp) {
    std::vector<std::string> out;
    for (const Component& c : sp.components())
        if (c.kind == CompKind::Ray) out.push_back(c.id);
    return out;
}

std::vector<std::string> ptIds(const Space& sp) {
    std::vector<std::string> out;
    for (const Component& c : sp.components())
        if (c.kind == CompKind::Pt) out.push_back(c.id);
    return out;
}

std::vector<Relation> terminalPool(const Space& sp, std::uint64_t budget) {
    std::vector<Relation> out;
    const auto rays = rayIds(sp);
    const auto pts = ptIds(sp);
    for (const auto& r : rays) {
        for (std::uint64_t k = 0; k <= budget; ++k) {
            pushUnique(out, Relation::band(sp, r, r, static_cast<std::int64_t>(k), UPSet::all()));
            if (k > 0)
                pushUnique(out,
                           Relation::band(sp, r, r, -static_cast<std::int64_t>(k), UPSet::all()));
        }
    }
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (std::size_t j = 0; j < rays.size(); ++j)
            if (i != j) pushUnique(out, Relation::band(sp, rays[i], rays[j], 0, UPSet::all()));
    for (const auto& p : pts) {
        pushUnique(out, Relation::singlePair(sp, {p, 0}, {p, 0}));
        for (const Component& c : sp.components())
            if (c.id != p)
                pushUnique(out, Relation::singlePair(sp, {p, 0}, compRep(sp, c.id)));
    }
    pushUnique(out, Relation::fullUnit(sp));
    return out;
}

PointSet compSlice(const Space& sp, const std::string& id, std::uint64_t budget) {
    if (sp.isRay(id)) return PointSet::ofRay(sp, id, UPSet::range(0, budget));
    return PointSet::empty(sp).withPoint(Point{id, 0});
}

std::vector<Relation> metricPool(const MetricGeom& g, std::uint64_t budget) {
    const Space& sp = g.space();
    std::vector<Relation> out;
    for (const auto& r : rayIds(sp)) {
        for (std::uint64_t k = 0; k <= budget; ++k) {
            pushUnique(out, Relation::band(sp, r, r, static_cast<std::int64_t>(k), UPSet::all()));
            if (k > 0)
                pushUnique(out,
                           Relation::band(sp, r, r, -static_cast<std::int64_t>(k), UPSet::all()));
        }
    }
    for (const auto& cl : g.clusters()) {
        std::vector<std::string> ids;
        for (const auto& [id, off] : cl) ids.push_back(id);
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < ids.size(); ++j) {
                if (i == j) continue;
                pushUnique(out, Relation::rect(compSlice(sp, ids[i], budget),
                                               compSlice(sp, ids[j], budget)));
            }
    }
    pushUnique(out, Relation::fullUnit(sp));
    return out;
}

std::vector<Relation> filterMembers(const StructurePtr& d, std::vector<Relation> pool) {
    std::vector<Relation> out;
    for (Relation& r : pool) {
        if (r.isEmpty()) continue;
        if (contains(d, r).in()) pushUnique(out, std::move(r));
    }
    return out;
}

// A region around `s` whose points stay near s; used to localize generator
// pools for ideals and quotients.
PointSet nearRegion(const StructurePtr& parent, const PointSet& s, std::uint64_t budget) {
    const Space& sp = parent->space();
    switch (parent->kind()) {
        case StructureDescr::Kind::Metric: return ballAround(parent->geom(), s, budget);
        case StructureDescr::Kind::Terminal: {
            if (s.isEmpty()) return s;
            PointSet out = s;
            for (const auto& r : rayIds(sp)) out = out.withRay(r, UPSet::range(0, budget).unite(out.ray(r)));
            return out;
        }
        default: return s;
    }
}

}  // namespace

std::vector<Relation> generators(const StructurePtr& d, std::uint64_t budget) {
    if (!d) throw InvalidArgument("generators: null structure");
    const Space& sp = d->space();
    switch (d->kind()) {
        case StructureDescr::Kind::Terminal: return terminalPool(sp, budget);
        case StructureDescr::Kind::Metric: return metricPool(d->geom(), budget);
        case StructureDescr::Kind::Initial: {
            std::vector<Relation> out;
            for (const auto& r : rayIds(sp))
                for (std::uint64_t i = 0; i < budget; ++i)
                    pushUnique(out, Relation::localUnit(PointSet::ofRay(sp, r, UPSet::single(i))));
            for (const auto& p : ptIds(sp))
                pushUnique(out, Relation::singlePair(sp, {p, 0}, {p, 0}));
            return out;
        }
        case StructureDescr::Kind::InitialConnected: {
            std::vector<Relation> out;
            for (const auto& r : rayIds(sp)) {
                for (std::uint64_t i = 0; i < budget; ++i)
                    pushUnique(out, Relation::localUnit(PointSet::ofRay(sp, r, UPSet::single(i))));
                for (std::uint64_t k = 1; k <= budget; ++k)
                    pushUnique(out, Relation::singlePair(sp, {r, 0}, {r, k}));
            }
            for (std::size_t i = 0; i < sp.size(); ++i)
                for (std::size_t j = i + 1; j < sp.size(); ++j)
                    pushUnique(out, Relation::singlePair(sp, compRep(sp, sp.components()[i].id),
                                                         compRep(sp, sp.components()[j].id)));
            for (const auto& p : ptIds(sp))
                pushUnique(out, Relation::singlePair(sp, {p, 0}, {p, 0}));
            return out;
        }
        case StructureDescr::Kind::InitialUnital: return {Relation::fullUnit(sp)};
        case StructureDescr::Kind::InitialConnectedUnital: {
            std::vector<Relation> out = {Relation::fullUnit(sp)};
            for (const auto& r : rayIds(sp))
                for (std::uint64_t k = 1; k <= budget; ++k)
                    pushUnique(out, Relation::singlePair(sp, {r, 0}, {r, k}));
            for (std::size_t i = 0; i < sp.size(); ++i)
                for (std::size_t j = i + 1; j < sp.size(); ++j)
                    pushUnique(out, Relation::singlePair(sp, compRep(sp, sp.components()[i].id),
                                                         compRep(sp, sp.components()[j].id)));
            return out;
        }
        case StructureDescr::Kind::Subspace: {
            std::vector<Relation> pool;
            for (const Relation& g : generators(d->parent(), budget))
                pool.push_back(g.restrict(d->set()));
            return filterMembers(d, std::move(pool));
        }
        case StructureDescr::Kind::Pullback:
        case StructureDescr::Kind::EqPullback:
            return filterMembers(d, terminalPool(sp, budget));
        case StructureDescr::Kind::Termination: {
            std::vector<Relation> pool = terminalPool(sp, budget);
            if (auto filt = sigmaUnitalFiltration(d->parent(), 2)) {
                for (const PointSet& level : *filt)
                    for (const Relation& g : terminalPool(sp, budget))
                        pool.push_back(g.restrict(level));
            }
            return filterMembers(d, std::move(pool));
        }
        case StructureDescr::Kind::Ideal: {
            PointSet region = nearRegion(d->parent(), d->set(), budget);
            std::vector<Relation> pool;
            for (const Relation& g : generators(d->parent(), budget))
                pool.push_back(g.restrict(region));
            return filterMembers(d, std::move(pool));
        }
        case StructureDescr::Kind::Quotient: {
            std::vector<Relation> pool = generators(d->parent(), budget);
            PointSet region = nearRegion(d->parent(), d->set(), budget);
            const auto rays = rayIds(sp);
            for (std::size_t i = 0; i < rays.size(); ++i)
                for (std::size_t j = 0; j < rays.size(); ++j) {
                    if (i == j) continue;
                    for (std::uint64_t k = 0; k <= budget; ++k) {
                        pool.push_back(Relation::band(sp, rays[i], rays[j],
                                                      static_cast<std::int64_t>(k), UPSet::all())
                                           .intersectRect(region, region));
                        if (k > 0)
                            pool.push_back(
                                Relation::band(sp, rays[i], rays[j],
                                               -static_cast<std::int64_t>(k), UPSet::all())
                                    .intersectRect(region, region));
                    }
                }
            if (region.isFinite())
                pool.push_back(Relation::rect(region, region));
            return filterMembers(d, std::move(pool));
        }
        case StructureDescr::Kind::Join: {
            std::vector<Relation> pool = d->joinGens();
            for (const Relation& g : generators(d->parent(), budget)) pool.push_back(g);
            return filterMembers(d, std::move(pool));
        }
        case StructureDescr::Kind::Connected: {
            std::vector<Relation> pool = generators(d->parent(), budget);
            for (std::size_t i = 0; i < sp.size(); ++i)
                for (std::size_t j = 0; j < sp.size(); ++j) {
                    if (i == j) continue;
                    pool.push_back(Relation::rect(compSlice(sp, sp.components()[i].id, budget),
                                                  compSlice(sp, sp.components()[j].id, budget)));
                }
            return filterMembers(d, std::move(pool));
        }
        case StructureDescr::Kind::Coproduct: {
            std::vector<Relation> out;
            for (const auto& s : d->summands())
                for (const Relation& g : generators(s, budget))
                    pushUnique(out, detail::transplantRelation(g, sp));
            return out;
        }
        case StructureDescr::Kind::Meet: {
            std::vector<Relation> pool = generators(d->parent(), budget);
            for (const Relation& g : generators(d->parent2(), budget)) pool.push_back(g);
            return filterMembers(d, std::move(pool));
        }
    }
    throw InvalidArgument("generators: unhandled kind");
}

std::vector<SymRelation> probeFamily(const StructurePtr& d, std::uint64_t budget) {
    if (!d) throw InvalidArgument("probeFamily: null structure");
    const Space& sp = d->space();
    std::vector<SymRelation> pool;
    const auto rays = rayIds(sp);
    for (const auto& r : rays) {
        pool.push_back(shearOnly(sp, ShearPiece{r, 1, 0, r, 2, 0, UPSet::all()}));
        pool.push_back(
            SymRelation::ofRelation(Relation::band(sp, r, r, static_cast<std::int64_t>(budget),
                                                   UPSet::all())));
    }
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (std::size_t j = 0; j < rays.size(); ++j) {
            if (i == j) continue;
            pool.push_back(shearOnly(sp, ShearPiece{rays[i], 1, 0, rays[j], 2, 0, UPSet::all()}));
            pool.push_back(
                SymRelation::ofRelation(Relation::band(sp, rays[i], rays[j], 0, UPSet::all())));
        }
    pool.push_back(SymRelation::ofRelation(Relation::fullUnit(sp)));
    std::vector<SymRelation> out;
    for (SymRelation& p : pool) {
        if (p.isEmptySet()) continue;
        if (containsSym(d, p).in()) out.push_back(std::move(p));
    }
    return out;
}

// ===========================================================================
// σ-unital filtrations
// ===========================================================================

namespace {

std::optional<std::vector<PointSet>> filtrationCandidate(const StructurePtr& d,
                                                         std::size_t levels) {
    const Space& sp = d->space();
    if (isUnital(d).in()) return std::vector<PointSet>(levels, PointSet::full(sp));
    auto prefixLevels = [&]() {
        std::vector<PointSet> out;
        for (std::size_t m = 0; m < levels; ++m) {
            PointSet lvl = PointSet::empty(sp);
            for (const auto& r : rayIds(sp)) lvl = lvl.withRay(r, UPSet::range(0, m));
            for (const auto& p : ptIds(sp)) lvl = lvl.withPoint(Point{p, 0});
            out.push_back(std::move(lvl));
        }
        return out;
    };
    switch (d->kind()) {
        case StructureDescr::Kind::Initial:
        case StructureDescr::Kind::InitialConnected: return prefixLevels();
        case StructureDescr::Kind::Subspace: {
            auto pf = sigmaUnitalFiltration(d->parent(), levels);
            if (!pf) return std::nullopt;
            std::vector<PointSet> out;
            for (const PointSet& l : *pf) out.push_back(l.intersect(d->set()));
            return out;
        }
        case StructureDescr::Kind::Termination: return sigmaUnitalFiltration(d->parent(), levels);
        case StructureDescr::Kind::Ideal: {
            if (d->parent()->kind() == StructureDescr::Kind::Metric) {
                std::vector<PointSet> out;
                for (std::size_t m = 0; m < levels; ++m)
                    out.push_back(ballAround(d->parent()->geom(), d->set(), m));
                return out;
            }
            if (d->parent()->kind() == StructureDescr::Kind::Terminal) {
                auto pl = prefixLevels();
                std::vector<PointSet> out;
                for (PointSet& l : pl) out.push_back(l.unite(d->set()));
                return out;
            }
            return std::nullopt;
        }
        case StructureDescr::Kind::Quotient: {
            auto pf = sigmaUnitalFiltration(d->parent(), levels);
            if (!pf) return std::nullopt;
            if (d->parent()->kind() != StructureDescr::Kind::Metric) return pf;
            std::vector<PointSet> out;
            for (std::size_t m = 0; m < levels; ++m)
                out.push_back((*pf)[m].unite(ballAround(d->parent()->geom(), d->set(), m)));
            return out;
        }
        case StructureDescr::Kind::Pullback: {
            auto pf = sigmaUnitalFiltration(d->parent(), levels);
            if (!pf) return std::nullopt;
            const EAMap& f = d->mapF();
            std::vector<PointSet> out;
            for (std::size_t m = 0; m < levels; ++m) {
                PointSet pre = f.preimageSet((*pf)[m]);
                // Constant ray tails have infinite fibers; keep only a growing
                // finite prefix there so every level stays a member.
                for (const auto& r : rayIds(sp)) {
                    const RayRule& rr = f.rayRule(r);
                    if (std::holds_alternative<ConstTail>(rr.tail)) {
                        UPSet slice = pre.ray(r).intersect(UPSet::range(0, rr.table.size() + m));
                        pre = pre.withRay(r, slice);
                    }
                }
                out.push_back(std::move(pre));
            }
            return out;
        }
        case StructureDescr::Kind::Connected: {
            auto pf = sigmaUnitalFiltration(d->parent(), levels);
            if (!pf) return std::nullopt;
            auto pl = prefixLevels();
            std::vector<PointSet> out;
            for (std::size_t m = 0; m < levels; ++m) out.push_back((*pf)[m].unite(pl[m]));
            return out;
        }
        case StructureDescr::Kind::Coproduct: {
            std::vector<PointSet> out(levels, PointSet::empty(sp));
            for (const auto& s : d->summands()) {
                auto sf = sigmaUnitalFiltration(s, levels);
                if (!sf) return std::nullopt;
                for (std::size_t m = 0; m < levels; ++m)
                    out[m] = out[m].unite(detail::transplantPointSet((*sf)[m], sp));
            }
            return out;
        }
        case StructureDescr::Kind::Meet: {
            auto a = sigmaUnitalFiltration(d->parent(), levels);
            auto b = sigmaUnitalFiltration(d->parent2(), levels);
            if (!a || !b) return std::nullopt;
            std::vector<PointSet> out;
            for (std::size_t m = 0; m < levels; ++m) out.push_back((*a)[m].intersect((*b)[m]));
            return out;
        }
        case StructureDescr::Kind::Join: return sigmaUnitalFiltration(d->parent(), levels);
        default: return std::nullopt;
    }
}

}  // namespace

std::optional<std::vector<PointSet>> sigmaUnitalFiltration(const StructurePtr& d,
                                                           std::size_t levels) {
    if (!d) throw InvalidArgument("sigmaUnitalFiltration: null structure");
    auto cand = filtrationCandidate(d, levels);
    if (!cand) return std::nullopt;
    for (std::size_t i = 0; i < cand->size(); ++i) {
        if (!unitalSubspace(d, (*cand)[i]).in()) return std::nullopt;
        if (i > 0 && !(*cand)[i - 1].subsetOf((*cand)[i])) return std::nullopt;
    }
    return cand;
}

}  // namespace crs
