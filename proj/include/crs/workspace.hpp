#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "crs/category.hpp"
#include "crs/finite.hpp"

namespace crs {

// Named inputs for CLI queries, loaded from a single JSON document:
//   {"spaces":{...},"structures":{...},"maps":{...},
//    "finiteSpaces":{...},"finiteMaps":{...}}          (all sections optional)
struct Workspace {
    std::map<std::string, Space> spaces;
    std::map<std::string, StructurePtr> structures;
    std::map<std::string, EAMap> maps;
    std::map<std::string, FinSpace> finiteSpaces;
    std::map<std::string, FinMap> finiteMaps;

    static Workspace fromJson(const nlohmann::json& j);
    nlohmann::json toJson() const;

    // Lookups throw ResolveError naming the missing id.
    const Space& space(const std::string& name) const;
    const StructurePtr& structure(const std::string& name) const;
    const EAMap& map(const std::string& name) const;
    const FinSpace& finiteSpace(const std::string& name) const;
    const FinMap& finiteMap(const std::string& name) const;
};

struct QueryOptions {
    std::uint64_t depth = 3;
    std::uint64_t window = 64;
    std::uint64_t budget = 8;
    std::uint64_t seed = 0;
};

struct QueryReport {
    Verdict verdict;
    nlohmann::json payload;  // {"query","verdict","code","certificate"|"witness",...}

    // 0 = In, 1 = Out, 2 = Unknown.
    int exitCode() const;
    std::string toText() const;
};

// Dispatch one named query with positional arguments:
//   check-coarse <map> <srcStructure> <dstStructure>
//   check-close <mapF> <mapG> <srcStructure> <dstStructure>
//   contains <structure> <relationJson>
//   equalizer <mapF> <mapG> <srcStructure> <dstStructure>
//   coequalizer <mapF> <mapG> <srcStructure> <dstStructure>
//   quotient <structure> <pointSetJson>
//   classify <map> <srcStructure> <dstStructure>
//   terminate <structure>
//   witness-equivalence <mapF> <mapG> <structureX> <structureY>
//   sigma-filtration <structure> [levels]
//   fin-oracle product|coproduct <A> <B> [maxApex]
//   fin-oracle equalizer|coequalizer <f> <g> <Y> <X> [maxApex]
//   fin-oracle pushout <f> <g> <Z> <A> <B> [maxApex]
// Unknown queries or wrong arities throw InvalidArgument; missing names throw
// ResolveError; malformed inline JSON throws ParseError; the construction
// errors propagate verbatim.
QueryReport runQuery(const Workspace& ws, const std::string& query,
                     const std::vector<std::string>& args, const QueryOptions& opt = {});

}  // namespace crs
