#include "crs/io.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "crs/errors.hpp"

namespace crs::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing field \"") + key + '"');
    return *it;
}

std::string asString(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::uint64_t asU64(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    fail(path, "expected a nonnegative integer");
}

std::int64_t asI64(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

std::vector<std::uint64_t> asU64List(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of nonnegative integers");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(asU64(j[i], path + '[' + std::to_string(i) + ']'));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Point / UPSet / Space
// ---------------------------------------------------------------------------

json toJson(const Point& p) { return json{{"comp", p.comp}, {"index", p.index}}; }

Point pointFromJson(const json& j, const std::string& path) {
    return Point{asString(field(j, "comp", path), path + ".comp"),
                 asU64(field(j, "index", path), path + ".index")};
}

json toJson(const UPSet& s) {
    return json{{"prefix", s.prefix()},
                {"threshold", s.threshold()},
                {"period", s.period()},
                {"residues", s.residues()}};
}

UPSet upsetFromJson(const json& j, const std::string& path) {
    return UPSet::fromParts(asU64List(field(j, "prefix", path), path + ".prefix"),
                            asU64(field(j, "threshold", path), path + ".threshold"),
                            asU64(field(j, "period", path), path + ".period"),
                            asU64List(field(j, "residues", path), path + ".residues"));
}

json toJson(const Space& sp) {
    json comps = json::array();
    for (const Component& c : sp.components())
        comps.push_back(json{{"id", c.id}, {"kind", c.kind == CompKind::Ray ? "ray" : "pt"}});
    return json{{"components", std::move(comps)}};
}

Space spaceFromJson(const json& j, const std::string& path) {
    const json& comps = field(j, "components", path);
    const std::string cpath = path + ".components";
    if (!comps.is_array()) fail(cpath, "expected an array");
    std::vector<Component> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string ipath = cpath + '[' + std::to_string(i) + ']';
        const std::string kind = asString(field(comps[i], "kind", ipath), ipath + ".kind");
        if (kind != "ray" && kind != "pt") fail(ipath + ".kind", "expected \"ray\" or \"pt\"");
        out.push_back({asString(field(comps[i], "id", ipath), ipath + ".id"),
                       kind == "ray" ? CompKind::Ray : CompKind::Pt});
    }
    try {
        return Space::make(std::move(out));
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

// ---------------------------------------------------------------------------
// PointSet / Relation
// ---------------------------------------------------------------------------

json toJson(const PointSet& s) {
    json rays = json::object();
    for (const auto& [id, slice] : s.raySlices()) rays[id] = toJson(slice);
    return json{{"rays", std::move(rays)},
                {"pts", std::vector<std::string>(s.ptMembers().begin(), s.ptMembers().end())}};
}

PointSet pointSetFromJson(const json& j, const Space& host, const std::string& path) {
    PointSet out = PointSet::empty(host);
    const json& rays = field(j, "rays", path);
    if (!rays.is_object()) fail(path + ".rays", "expected an object");
    for (const auto& [id, slice] : rays.items()) {
        const std::string ipath = path + ".rays." + id;
        try {
            out = out.withRay(id, upsetFromJson(slice, ipath));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(ipath, e.what());
        }
    }
    const json& pts = field(j, "pts", path);
    if (!pts.is_array()) fail(path + ".pts", "expected an array of component ids");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string ipath = path + ".pts[" + std::to_string(i) + ']';
        try {
            out = out.withPoint(Point{asString(pts[i], ipath), 0});
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(ipath, e.what());
        }
    }
    return out;
}

json toJson(const Relation& r) {
    json bands = json::array();
    for (const Band& b : r.bands())
        bands.push_back(json{{"src", b.src},
                             {"dst", b.dst},
                             {"offset", b.offset},
                             {"support", toJson(b.support)}});
    json rects = json::array();
    for (const Rect& rc : r.rects())
        rects.push_back(json{{"left", toJson(rc.left)}, {"right", toJson(rc.right)}});
    return json{{"bands", std::move(bands)}, {"rects", std::move(rects)}};
}

Relation relationFromJson(const json& j, const Space& host, const std::string& path) {
    Relation out = Relation::empty(host);
    const json& bands = field(j, "bands", path);
    if (!bands.is_array()) fail(path + ".bands", "expected an array");
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const std::string ipath = path + ".bands[" + std::to_string(i) + ']';
        try {
            out = out.unite(Relation::band(
                host, asString(field(bands[i], "src", ipath), ipath + ".src"),
                asString(field(bands[i], "dst", ipath), ipath + ".dst"),
                asI64(field(bands[i], "offset", ipath), ipath + ".offset"),
                upsetFromJson(field(bands[i], "support", ipath), ipath + ".support")));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(ipath, e.what());
        }
    }
    const json& rects = field(j, "rects", path);
    if (!rects.is_array()) fail(path + ".rects", "expected an array");
    for (std::size_t i = 0; i < rects.size(); ++i) {
        const std::string ipath = path + ".rects[" + std::to_string(i) + ']';
        try {
            out = out.unite(Relation::rect(
                pointSetFromJson(field(rects[i], "left", ipath), host, ipath + ".left"),
                pointSetFromJson(field(rects[i], "right", ipath), host, ipath + ".right")));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(ipath, e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// EAMap
// ---------------------------------------------------------------------------

json toJson(const EAMap& f) {
    json pts = json::object();
    json rays = json::object();
    for (const Component& c : f.source().components()) {
        if (c.kind == CompKind::Pt) {
            pts[c.id] = toJson(f.ptImage(c.id));
            continue;
        }
        const RayRule& rule = f.rayRule(c.id);
        json table = json::array();
        for (const Point& p : rule.table) table.push_back(toJson(p));
        json tail;
        if (const auto* aff = std::get_if<AffineTail>(&rule.tail))
            tail = json{{"a", aff->a}, {"b", aff->b}, {"dstRay", aff->dstRay}};
        else
            tail = json{{"value", toJson(std::get<ConstTail>(rule.tail).value)}};
        rays[c.id] = json{{"table", std::move(table)}, {"tail", std::move(tail)}};
    }
    return json{{"source", toJson(f.source())},
                {"target", toJson(f.target())},
                {"pts", std::move(pts)},
                {"rays", std::move(rays)}};
}

EAMap mapFromJson(const json& j, const std::string& path) {
    Space source = spaceFromJson(field(j, "source", path), path + ".source");
    Space target = spaceFromJson(field(j, "target", path), path + ".target");
    std::map<std::string, Point> ptImages;
    const json& pts = field(j, "pts", path);
    if (!pts.is_object()) fail(path + ".pts", "expected an object");
    for (const auto& [id, img] : pts.items())
        ptImages.emplace(id, pointFromJson(img, path + ".pts." + id));
    std::map<std::string, RayRule> rayRules;
    const json& rays = field(j, "rays", path);
    if (!rays.is_object()) fail(path + ".rays", "expected an object");
    for (const auto& [id, rule] : rays.items()) {
        const std::string ipath = path + ".rays." + id;
        RayRule out;
        const json& table = field(rule, "table", ipath);
        if (!table.is_array()) fail(ipath + ".table", "expected an array");
        for (std::size_t k = 0; k < table.size(); ++k)
            out.table.push_back(
                pointFromJson(table[k], ipath + ".table[" + std::to_string(k) + ']'));
        const json& tail = field(rule, "tail", ipath);
        if (tail.contains("value"))
            out.tail = ConstTail{pointFromJson(field(tail, "value", ipath + ".tail"),
                                               ipath + ".tail.value")};
        else
            out.tail = AffineTail{
                asU64(field(tail, "a", ipath + ".tail"), ipath + ".tail.a"),
                asI64(field(tail, "b", ipath + ".tail"), ipath + ".tail.b"),
                asString(field(tail, "dstRay", ipath + ".tail"), ipath + ".tail.dstRay")};
        rayRules.emplace(id, std::move(out));
    }
    try {
        return EAMap::make(std::move(source), std::move(target), std::move(ptImages),
                           std::move(rayRules));
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

// ---------------------------------------------------------------------------
// Structure descriptors
// ---------------------------------------------------------------------------

namespace {

json clustersToJson(const MetricGeom& geom) {
    json out = json::array();
    for (const MetricGeom::Cluster& c : geom.clusters()) {
        json cluster = json::object();
        for (const auto& [id, off] : c) cluster[id] = off;
        out.push_back(std::move(cluster));
    }
    return out;
}

std::vector<MetricGeom::Cluster> clustersFromJson(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of clusters");
    std::vector<MetricGeom::Cluster> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string ipath = path + '[' + std::to_string(i) + ']';
        if (!j[i].is_object()) fail(ipath, "expected an object of component offsets");
        MetricGeom::Cluster c;
        for (const auto& [id, off] : j[i].items()) c[id] = asU64(off, ipath + '.' + id);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

json toJson(const StructurePtr& d) {
    using Kind = StructureDescr::Kind;
    switch (d->kind()) {
        case Kind::Terminal:
            return json{{"kind", "terminal"}, {"space", toJson(d->space())}};
        case Kind::Metric:
            return json{{"kind", "metric"},
                        {"space", toJson(d->space())},
                        {"clusters", clustersToJson(d->geom())}};
        case Kind::Initial:
            return json{{"kind", "initial"}, {"space", toJson(d->space())}};
        case Kind::InitialConnected:
            return json{{"kind", "initialConnected"}, {"space", toJson(d->space())}};
        case Kind::InitialUnital:
            return json{{"kind", "initialUnital"}, {"space", toJson(d->space())}};
        case Kind::InitialConnectedUnital:
            return json{{"kind", "initialConnectedUnital"}, {"space", toJson(d->space())}};
        case Kind::Subspace:
            return json{{"kind", "subspace"},
                        {"parent", toJson(d->parent())},
                        {"set", toJson(d->set())}};
        case Kind::Pullback:
            return json{{"kind", "pullback"},
                        {"map", toJson(d->mapF())},
                        {"parent", toJson(d->parent())}};
        case Kind::EqPullback:
            return json{{"kind", "eqPullback"},
                        {"map", toJson(d->mapF())},
                        {"map2", toJson(d->mapG())},
                        {"parent", toJson(d->parent())}};
        case Kind::Termination:
            return json{{"kind", "termination"}, {"parent", toJson(d->parent())}};
        case Kind::Ideal:
            return json{{"kind", "ideal"},
                        {"parent", toJson(d->parent())},
                        {"set", toJson(d->set())}};
        case Kind::Quotient:
            return json{{"kind", "quotient"},
                        {"parent", toJson(d->parent())},
                        {"Y", toJson(d->set())}};
        case Kind::Join: {
            json gens = json::array();
            for (const Relation& g : d->joinGens()) gens.push_back(toJson(g));
            return json{{"kind", "join"},
                        {"parent", toJson(d->parent())},
                        {"gens", std::move(gens)},
                        {"depth", d->joinDepth()}};
        }
        case Kind::Connected:
            return json{{"kind", "connected"}, {"parent", toJson(d->parent())}};
        case Kind::Coproduct: {
            json summands = json::array();
            for (const StructurePtr& s : d->summands()) summands.push_back(toJson(s));
            return json{{"kind", "coproduct"}, {"summands", std::move(summands)}};
        }
        case Kind::Meet:
            return json{{"kind", "meet"},
                        {"parent", toJson(d->parent())},
                        {"parent2", toJson(d->parent2())}};
    }
    throw InvalidArgument("unhandled structure kind");
}

StructurePtr structureFromJson(const json& j, const std::string& path) {
    const std::string kind = asString(field(j, "kind", path), path + ".kind");
    try {
        if (kind == "terminal")
            return StructureDescr::terminal(
                spaceFromJson(field(j, "space", path), path + ".space"));
        if (kind == "metric") {
            Space sp = spaceFromJson(field(j, "space", path), path + ".space");
            return StructureDescr::metric(MetricGeom::glued(
                sp, clustersFromJson(field(j, "clusters", path), path + ".clusters")));
        }
        if (kind == "initial")
            return StructureDescr::initial(
                spaceFromJson(field(j, "space", path), path + ".space"));
        if (kind == "initialConnected")
            return StructureDescr::initialConnected(
                spaceFromJson(field(j, "space", path), path + ".space"));
        if (kind == "initialUnital")
            return StructureDescr::initialUnital(
                spaceFromJson(field(j, "space", path), path + ".space"));
        if (kind == "initialConnectedUnital")
            return StructureDescr::initialConnectedUnital(
                spaceFromJson(field(j, "space", path), path + ".space"));
        if (kind == "subspace") {
            StructurePtr parent =
                structureFromJson(field(j, "parent", path), path + ".parent");
            PointSet s =
                pointSetFromJson(field(j, "set", path), parent->space(), path + ".set");
            return StructureDescr::subspace(std::move(parent), std::move(s));
        }
        if (kind == "pullback")
            return StructureDescr::pullback(
                mapFromJson(field(j, "map", path), path + ".map"),
                structureFromJson(field(j, "parent", path), path + ".parent"));
        if (kind == "eqPullback")
            return StructureDescr::eqPullback(
                mapFromJson(field(j, "map", path), path + ".map"),
                mapFromJson(field(j, "map2", path), path + ".map2"),
                structureFromJson(field(j, "parent", path), path + ".parent"));
        if (kind == "termination")
            return StructureDescr::termination(
                structureFromJson(field(j, "parent", path), path + ".parent"));
        if (kind == "ideal") {
            StructurePtr parent =
                structureFromJson(field(j, "parent", path), path + ".parent");
            PointSet s =
                pointSetFromJson(field(j, "set", path), parent->space(), path + ".set");
            return StructureDescr::ideal(std::move(parent), std::move(s));
        }
        if (kind == "quotient") {
            StructurePtr parent =
                structureFromJson(field(j, "parent", path), path + ".parent");
            PointSet y =
                pointSetFromJson(field(j, "Y", path), parent->space(), path + ".Y");
            return StructureDescr::quotient(std::move(parent), std::move(y));
        }
        if (kind == "join") {
            StructurePtr parent =
                structureFromJson(field(j, "parent", path), path + ".parent");
            const json& gensJson = field(j, "gens", path);
            if (!gensJson.is_array()) fail(path + ".gens", "expected an array");
            std::vector<Relation> gens;
            for (std::size_t i = 0; i < gensJson.size(); ++i)
                gens.push_back(relationFromJson(gensJson[i], parent->space(),
                                                path + ".gens[" + std::to_string(i) + ']'));
            return StructureDescr::join(std::move(parent), std::move(gens),
                                        asU64(field(j, "depth", path), path + ".depth"));
        }
        if (kind == "connected")
            return StructureDescr::connected(
                structureFromJson(field(j, "parent", path), path + ".parent"));
        if (kind == "coproduct") {
            const json& summandsJson = field(j, "summands", path);
            if (!summandsJson.is_array()) fail(path + ".summands", "expected an array");
            std::vector<StructurePtr> summands;
            for (std::size_t i = 0; i < summandsJson.size(); ++i)
                summands.push_back(structureFromJson(
                    summandsJson[i], path + ".summands[" + std::to_string(i) + ']'));
            return StructureDescr::coproductOf(std::move(summands));
        }
        if (kind == "meet")
            return StructureDescr::meet(
                structureFromJson(field(j, "parent", path), path + ".parent"),
                structureFromJson(field(j, "parent2", path), path + ".parent2"));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown structure kind \"" + kind + '"');
}

// ---------------------------------------------------------------------------
// Finite backend
// ---------------------------------------------------------------------------

json toJson(const FinSpace& s) { return json{{"n", s.n}, {"partition", s.partition}}; }

FinSpace finSpaceFromJson(const json& j, const std::string& path) {
    const json& part = field(j, "partition", path);
    if (!part.is_array()) fail(path + ".partition", "expected an array of blocks");
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < part.size(); ++i) {
        std::vector<std::size_t> blk;
        for (std::uint64_t x :
             asU64List(part[i], path + ".partition[" + std::to_string(i) + ']'))
            blk.push_back(static_cast<std::size_t>(x));
        blocks.push_back(std::move(blk));
    }
    try {
        return FinSpace::of(asU64(field(j, "n", path), path + ".n"), std::move(blocks));
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

json toJson(const FinMap& f) {
    return json{{"src", f.srcSize}, {"dst", f.dstSize}, {"values", f.values}};
}

FinMap finMapFromJson(const json& j, const std::string& path) {
    std::vector<std::size_t> values;
    for (std::uint64_t v : asU64List(field(j, "values", path), path + ".values"))
        values.push_back(static_cast<std::size_t>(v));
    try {
        return FinMap::of(asU64(field(j, "src", path), path + ".src"),
                          asU64(field(j, "dst", path), path + ".dst"), std::move(values));
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

json toJson(const Verdict& v) {
    json out{{"state", v.stateName()}, {"code", v.code}, {"detail", v.detail}};
    if (v.pairWitness)
        out["pair"] = json::array({toJson(v.pairWitness->first), toJson(v.pairWitness->second)});
    if (v.improperWitness)
        out["improper"] = json{{"point", toJson(v.improperWitness->point)},
                               {"projection", v.improperWitness->projection}};
    if (!v.rels.empty()) {
        json rels = json::array();
        for (const Relation& r : v.rels) rels.push_back(toJson(r));
        out["rels"] = std::move(rels);
    }
    if (!v.shearWitness.empty()) {
        json shears = json::array();
        for (const ShearPiece& s : v.shearWitness)
            shears.push_back(json{{"r1", s.r1},
                                  {"a1", s.a1},
                                  {"b1", s.b1},
                                  {"r2", s.r2},
                                  {"a2", s.a2},
                                  {"b2", s.b2},
                                  {"support", toJson(s.support)}});
        out["shears"] = std::move(shears);
    }
    if (v.exhaustedDepth != 0) out["exhaustedDepth"] = v.exhaustedDepth;
    return out;
}

json parseDocument(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON at byte ") + std::to_string(e.byte) +
                         ": " + e.what());
    }
}

}  // namespace crs::io
