#pragma once

#include <string>

#include <json.hpp>

#include "crs/finite.hpp"
#include "crs/structures.hpp"
#include "crs/verdict.hpp"

// JSON serialization for every value the CLI and workspace files exchange.
// Shapes (all parsers throw ParseError naming the offending path):
//
//   Point      {"comp":"r0","index":3}
//   UPSet      {"prefix":[1],"threshold":2,"period":2,"residues":[0]}
//   Space      {"components":[{"id":"r0","kind":"ray"},{"id":"q","kind":"pt"}]}
//   PointSet   {"rays":{"r0":<upset>},"pts":["q"]}          (host space given)
//   Relation   {"bands":[{"src":"a","dst":"b","offset":-2,"support":<upset>}],
//               "rects":[{"left":<pointset>,"right":<pointset>}]}
//   EAMap      {"source":<space>,"target":<space>,"pts":{"q":<point>},
//               "rays":{"r0":{"table":[<point>...],
//                             "tail":{"a":2,"b":1,"dstRay":"s"} | {"value":<point>}}}}
//   Structure  {"kind":"metric","space":<space>,"clusters":[{"r0":0}]}
//              {"kind":"subspace","parent":<structure>,"set":<pointset>}
//              {"kind":"quotient","parent":<structure>,"Y":<pointset>}   etc.
//   FinSpace   {"n":4,"partition":[[0,1],[2],[3]]}
//   FinMap     {"src":3,"dst":2,"values":[0,0,1]}
//   Verdict    {"state":"In","code":"...","detail":{...}, optional witnesses}

namespace crs::io {

nlohmann::json toJson(const Point& p);
Point pointFromJson(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json toJson(const UPSet& s);
UPSet upsetFromJson(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json toJson(const Space& sp);
Space spaceFromJson(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json toJson(const PointSet& s);
PointSet pointSetFromJson(const nlohmann::json& j, const Space& host,
                          const std::string& path = "$");

nlohmann::json toJson(const Relation& r);
Relation relationFromJson(const nlohmann::json& j, const Space& host,
                          const std::string& path = "$");

nlohmann::json toJson(const EAMap& f);
EAMap mapFromJson(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json toJson(const StructurePtr& d);
StructurePtr structureFromJson(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json toJson(const FinSpace& s);
FinSpace finSpaceFromJson(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json toJson(const FinMap& f);
FinMap finMapFromJson(const nlohmann::json& j, const std::string& path = "$");

// Serialize-only: verdicts are re-derived by the engines, never parsed back.
nlohmann::json toJson(const Verdict& v);

// Parse a whole document, converting nlohmann's syntax errors into
// ParseError with the byte offset.
nlohmann::json parseDocument(const std::string& text);

}  // namespace crs::io
