#include "crs/workspace.hpp"

#include <chrono>
#include <utility>

#include "crs/errors.hpp"
#include "crs/io.hpp"

namespace crs {

namespace {

using nlohmann::json;

template <typename T>
const T& lookup(const std::map<std::string, T>& table, const std::string& name,
                const char* what) {
    const auto it = table.find(name);
    if (it == table.end())
        throw ResolveError(std::string("no ") + what + " named \"" + name +
                           "\" in workspace");
    return it->second;
}

void requireArgs(const std::vector<std::string>& args, std::size_t n,
                 const char* usage) {
    if (args.size() != n)
        throw InvalidArgument(std::string("expected arguments: ") + usage);
}

std::uint64_t numericArg(const std::string& arg, const char* what) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(arg, &pos);
        if (pos != arg.size()) throw std::invalid_argument(arg);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(std::string(what) + " must be a nonnegative integer, got \"" +
                              arg + '"');
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

Workspace Workspace::fromJson(const json& j) {
    if (!j.is_object()) throw ParseError("$: workspace must be a JSON object");
    Workspace ws;
    if (j.contains("spaces"))
        for (const auto& [name, val] : j.at("spaces").items())
            ws.spaces.emplace(name, io::spaceFromJson(val, "$.spaces." + name));
    if (j.contains("structures"))
        for (const auto& [name, val] : j.at("structures").items())
            ws.structures.emplace(name, io::structureFromJson(val, "$.structures." + name));
    if (j.contains("maps"))
        for (const auto& [name, val] : j.at("maps").items())
            ws.maps.emplace(name, io::mapFromJson(val, "$.maps." + name));
    if (j.contains("finiteSpaces"))
        for (const auto& [name, val] : j.at("finiteSpaces").items())
            ws.finiteSpaces.emplace(name,
                                    io::finSpaceFromJson(val, "$.finiteSpaces." + name));
    if (j.contains("finiteMaps"))
        for (const auto& [name, val] : j.at("finiteMaps").items())
            ws.finiteMaps.emplace(name, io::finMapFromJson(val, "$.finiteMaps." + name));
    return ws;
}

json Workspace::toJson() const {
    json out = json::object();
    json spacesJson = json::object();
    for (const auto& [name, sp] : spaces) spacesJson[name] = io::toJson(sp);
    out["spaces"] = std::move(spacesJson);
    json structuresJson = json::object();
    for (const auto& [name, d] : structures) structuresJson[name] = io::toJson(d);
    out["structures"] = std::move(structuresJson);
    json mapsJson = json::object();
    for (const auto& [name, f] : maps) mapsJson[name] = io::toJson(f);
    out["maps"] = std::move(mapsJson);
    json finSpacesJson = json::object();
    for (const auto& [name, s] : finiteSpaces) finSpacesJson[name] = io::toJson(s);
    out["finiteSpaces"] = std::move(finSpacesJson);
    json finMapsJson = json::object();
    for (const auto& [name, f] : finiteMaps) finMapsJson[name] = io::toJson(f);
    out["finiteMaps"] = std::move(finMapsJson);
    return out;
}

const Space& Workspace::space(const std::string& name) const {
    return lookup(spaces, name, "space");
}
const StructurePtr& Workspace::structure(const std::string& name) const {
    return lookup(structures, name, "structure");
}
const EAMap& Workspace::map(const std::string& name) const {
    return lookup(maps, name, "map");
}
const FinSpace& Workspace::finiteSpace(const std::string& name) const {
    return lookup(finiteSpaces, name, "finite space");
}
const FinMap& Workspace::finiteMap(const std::string& name) const {
    return lookup(finiteMaps, name, "finite map");
}

// ---------------------------------------------------------------------------
// Query reports
// ---------------------------------------------------------------------------

int QueryReport::exitCode() const {
    if (verdict.in()) return 0;
    if (verdict.out()) return 1;
    return 2;
}

std::string QueryReport::toText() const {
    std::string out = "verdict: " + verdict.stateName() + "\ncode: " + verdict.code + '\n';
    for (const char* key : {"certificate", "witness", "exhausted"})
        if (payload.contains(key)) out += std::string(key) + ": " + payload[key].dump() + '\n';
    if (payload.contains("result")) out += "result: " + payload["result"].dump() + '\n';
    if (payload.contains("timings"))
        out += "time-ms: " + payload["timings"]["totalMs"].dump() + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Query dispatch
// ---------------------------------------------------------------------------

namespace {

struct QueryWork {
    Verdict verdict;
    json result;  // construction outputs; null when not a construction
};

QueryWork dispatch(const Workspace& ws, const std::string& query,
                   const std::vector<std::string>& args, const QueryOptions& opt) {
    if (query == "check-coarse") {
        requireArgs(args, 3, "check-coarse <map> <srcStructure> <dstStructure>");
        const ArrowCheck chk =
            checkCoarse(ws.map(args[0]), CoarseSpace::of(ws.structure(args[1])),
                        CoarseSpace::of(ws.structure(args[2])), opt.budget);
        json parts{{"locallyProper", io::toJson(chk.locallyProper)},
                   {"preserves", io::toJson(chk.preserves)}};
        return {chk.overall(), std::move(parts)};
    }
    if (query == "check-close") {
        requireArgs(args, 4, "check-close <mapF> <mapG> <srcStructure> <dstStructure>");
        return {checkClose(ws.map(args[0]), ws.map(args[1]),
                           CoarseSpace::of(ws.structure(args[2])),
                           CoarseSpace::of(ws.structure(args[3])), opt.budget),
                nullptr};
    }
    if (query == "contains") {
        requireArgs(args, 2, "contains <structure> <relationJson>");
        const StructurePtr& d = ws.structure(args[0]);
        const Relation e =
            io::relationFromJson(io::parseDocument(args[1]), d->space(), "$.relation");
        return {contains(d, e), nullptr};
    }
    if (query == "equalizer") {
        requireArgs(args, 4, "equalizer <mapF> <mapG> <srcStructure> <dstStructure>");
        const EqualizerResult eq =
            equalizer(ws.map(args[0]), ws.map(args[1]),
                      CoarseSpace::of(ws.structure(args[2])),
                      CoarseSpace::of(ws.structure(args[3])), opt.budget);
        json result{{"carrier", io::toJson(eq.carrier)},
                    {"structure", io::toJson(eq.object.structure)},
                    {"inclusion", io::toJson(eq.inclusion)}};
        return {Verdict::yes("equalizer-constructed"), std::move(result)};
    }
    if (query == "coequalizer") {
        requireArgs(args, 4, "coequalizer <mapF> <mapG> <srcStructure> <dstStructure>");
        const CoequalizerResult coeq =
            coequalizer(ws.map(args[0]), ws.map(args[1]),
                        CoarseSpace::of(ws.structure(args[2])),
                        CoarseSpace::of(ws.structure(args[3])), opt.budget, opt.depth);
        json result{{"structure", io::toJson(coeq.object.structure)},
                    {"map", io::toJson(coeq.map)}};
        return {Verdict::yes("coequalizer-constructed"), std::move(result)};
    }
    if (query == "quotient") {
        requireArgs(args, 2, "quotient <structure> <pointSetJson>");
        const StructurePtr& d = ws.structure(args[0]);
        const PointSet y =
            io::pointSetFromJson(io::parseDocument(args[1]), d->space(), "$.pointSet");
        const QuotientResult q = quotient(CoarseSpace::of(d), y);
        json result{{"structure", io::toJson(q.object.structure)},
                    {"map", io::toJson(q.map)}};
        return {Verdict::yes("quotient-constructed"), std::move(result)};
    }
    if (query == "classify") {
        requireArgs(args, 3, "classify <map> <srcStructure> <dstStructure>");
        const EAMap& f = ws.map(args[0]);
        const CoarseSpace src = CoarseSpace::of(ws.structure(args[1]));
        const CoarseSpace dst = CoarseSpace::of(ws.structure(args[2]));
        const Verdict monic = isMonic(f, src, dst, opt.budget);
        const Verdict epi = isEpi(f, src, dst, opt.budget, opt.depth);
        Verdict combined = allOf({monic, epi}, "mono-epi");
        json result{{"monic", io::toJson(monic)}, {"epi", io::toJson(epi)}};
        return {std::move(combined), std::move(result)};
    }
    if (query == "terminate") {
        requireArgs(args, 1, "terminate <structure>");
        const CoarseSpace t = terminate(CoarseSpace::of(ws.structure(args[0])));
        return {Verdict::yes("termination-constructed"),
                json{{"structure", io::toJson(t.structure)}}};
    }
    if (query == "witness-equivalence") {
        requireArgs(args, 4,
                    "witness-equivalence <mapF> <mapG> <structureX> <structureY>");
        return {equivalenceWitness(CoarseSpace::of(ws.structure(args[2])),
                                   CoarseSpace::of(ws.structure(args[3])),
                                   ws.map(args[0]), ws.map(args[1]), opt.budget),
                nullptr};
    }
    if (query == "sigma-filtration") {
        if (args.size() != 1 && args.size() != 2)
            throw InvalidArgument("expected arguments: sigma-filtration <structure> [levels]");
        const std::uint64_t levels =
            args.size() == 2 ? numericArg(args[1], "levels") : 4;
        const auto stages = sigmaUnitalFiltration(
            ws.structure(args[0]), static_cast<std::size_t>(levels));
        if (!stages)
            return {Verdict::no("no-sigma-filtration"), nullptr};
        json stagesJson = json::array();
        for (const PointSet& s : *stages) stagesJson.push_back(io::toJson(s));
        Verdict v = Verdict::yes("sigma-filtration");
        v.detail["levels"] = stages->size();
        return {std::move(v), json{{"stages", std::move(stagesJson)}}};
    }
    if (query == "fin-oracle") {
        if (args.empty())
            throw InvalidArgument(
                "expected arguments: fin-oracle <construction> <names...> [maxApex]");
        const std::string which = args[0];
        std::vector<std::string> rest(args.begin() + 1, args.end());
        FinOracleReport rep;
        if (which == "product" || which == "coproduct") {
            if (rest.size() != 2 && rest.size() != 3)
                throw InvalidArgument("expected arguments: fin-oracle " + which +
                                      " <A> <B> [maxApex]");
            const std::uint64_t apex =
                rest.size() == 3 ? numericArg(rest[2], "maxApex") : 3;
            const FinSpace& a = ws.finiteSpace(rest[0]);
            const FinSpace& b = ws.finiteSpace(rest[1]);
            rep = which == "product" ? finProductUniversal(a, b, apex)
                                     : finCoproductUniversal(a, b, apex);
        } else if (which == "equalizer" || which == "coequalizer") {
            if (rest.size() != 4 && rest.size() != 5)
                throw InvalidArgument("expected arguments: fin-oracle " + which +
                                      " <f> <g> <Y> <X> [maxApex]");
            const std::uint64_t apex =
                rest.size() == 5 ? numericArg(rest[4], "maxApex") : 3;
            const FinMap& f = ws.finiteMap(rest[0]);
            const FinMap& g = ws.finiteMap(rest[1]);
            const FinSpace& y = ws.finiteSpace(rest[2]);
            const FinSpace& x = ws.finiteSpace(rest[3]);
            rep = which == "equalizer" ? finEqualizerUniversal(f, g, y, x, apex)
                                       : finCoequalizerUniversal(f, g, y, x, apex);
        } else if (which == "pushout") {
            if (rest.size() != 5 && rest.size() != 6)
                throw InvalidArgument(
                    "expected arguments: fin-oracle pushout <f> <g> <Z> <A> <B> [maxApex]");
            const std::uint64_t apex =
                rest.size() == 6 ? numericArg(rest[5], "maxApex") : 3;
            rep = finPushoutUniversal(ws.finiteMap(rest[0]), ws.finiteMap(rest[1]),
                                      ws.finiteSpace(rest[2]), ws.finiteSpace(rest[3]),
                                      ws.finiteSpace(rest[4]), apex);
        } else {
            throw InvalidArgument("unknown fin-oracle construction \"" + which + '"');
        }
        Verdict v = rep.holds ? Verdict::yes("universal-property-verified")
                              : Verdict::no("universal-property-failed");
        v.detail["conesChecked"] = rep.conesChecked;
        if (!rep.holds) v.detail["counterexample"] = rep.counterexample;
        return {std::move(v), json{{"conesChecked", rep.conesChecked}}};
    }
    throw InvalidArgument("unknown query \"" + query + '"');
}

}  // namespace

QueryReport runQuery(const Workspace& ws, const std::string& query,
                     const std::vector<std::string>& args, const QueryOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    QueryWork work = dispatch(ws, query, args, opt);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    QueryReport rep;
    rep.verdict = std::move(work.verdict);
    rep.payload = json{{"query", query},
                       {"verdict", rep.verdict.stateName()},
                       {"code", rep.verdict.code},
                       {"options",
                        json{{"depth", opt.depth},
                             {"window", opt.window},
                             {"budget", opt.budget},
                             {"seed", opt.seed}}},
                       {"timings", json{{"totalMs", ms}}}};
    const char* reportKey = rep.verdict.in()      ? "certificate"
                            : rep.verdict.out()   ? "witness"
                                                  : "exhausted";
    rep.payload[reportKey] = io::toJson(rep.verdict);
    if (!work.result.is_null()) rep.payload["result"] = std::move(work.result);
    return rep;
}

}  // namespace crs
