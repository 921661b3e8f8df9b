#pragma once

// Helpers shared by the structure engine (membership, nearness, comparison).

#include <cstdint>
#include <optional>
#include <vector>

#include "crs/structures.hpp"

namespace crs::detail {

// ---------------------------------------------------------------------------
// Parameter bounds: conservative windows beyond which every membership rule
// of a descriptor tree behaves periodically.
// ---------------------------------------------------------------------------

struct ParamBound {
    std::uint64_t reach = 0;   // max threshold / prefix element / |offset| + 1
    std::uint64_t period = 1;  // lcm of periods (capped)

    void absorb(const ParamBound& o);
    void absorbReach(std::uint64_t r);
    void absorbPeriod(std::uint64_t p);
};

ParamBound upsetParams(const UPSet& u);
ParamBound pointSetParams(const PointSet& s);
ParamBound relationParams(const Relation& e);
ParamBound symParams(const SymRelation& s);
ParamBound mapParams(const EAMap& f);
ParamBound structureParams(const StructurePtr& d);

// Trim window: beyond this index, membership of the tail is stable.
std::uint64_t stableWindow(const StructurePtr& d, const SymRelation& s);

// ---------------------------------------------------------------------------
// Trimming: remove a finite perturbation. Band and shear supports lose their
// members below the window; a rectangle is dropped only when both sides are
// finite (an infinite-sided rectangle survives any finite deletion).
// ---------------------------------------------------------------------------

SymRelation trimSym(const SymRelation& s, std::uint64_t window);

// ---------------------------------------------------------------------------
// Capability sets and supply
// ---------------------------------------------------------------------------

// { x : 1_x is a member of d }. Exact on the catalog.
PointSet capSet(const StructurePtr& d);

// Can d provide unit supply inside t?  `some`: a nonempty T' ⊆ t with
// 1_T' ∈ d; `infinite`: an infinite such T'. `known` is false only when a
// bounded search (Join) could not decide.
struct Supply {
    bool known = true;
    bool some = false;
    bool infinite = false;
};
Supply unitSupply(const StructurePtr& d, const PointSet& t);

// Is there an infinite subset of t near s (in the nearness sense of d)?
// Exact for metric and terminal descriptors, conservative otherwise.
Supply nearSupply(const StructurePtr& d, const PointSet& t, const PointSet& s);

// ---------------------------------------------------------------------------
// Component-level reachability (over-approximation of connectivity)
// ---------------------------------------------------------------------------

// Pairs of component ids that some member of d may link. Entries are an
// over-approximation: a pair absent here is certainly never linked.
std::vector<std::pair<std::string, std::string>> compGraph(const StructurePtr& d);

// Transitive-reflexive-symmetric closure over the component ids of sp.
std::vector<std::vector<std::string>> closeCompGraph(
    const Space& sp, std::vector<std::pair<std::string, std::string>> edges);

// ---------------------------------------------------------------------------
// Misc small helpers
// ---------------------------------------------------------------------------

std::uint64_t maxAbsOffsetSym(const SymRelation& s);

// Rebuild a relation over another space with the same component ids.
Relation transplantRelation(const Relation& e, const Space& sp);
PointSet transplantPointSet(const PointSet& s, const Space& sp);

// First index of `sup` at which the two shear legs differ; the shear has an
// off-diagonal pair at every index except at most one.
std::optional<std::uint64_t> shearOffDiagIndex(const ShearPiece& p);

// Restriction properness of (f × g) on a symbolic relation: a sheared piece
// collapses only when both composed legs are eventually constant.
std::optional<std::pair<Point, Point>> restrictionImpropernessSym(
    const EAMap& f, const EAMap& g, const SymRelation& s);

// ---------------------------------------------------------------------------
// Generator-quantified map conditions (shared by comparison and the arrow
// checkers)
// ---------------------------------------------------------------------------

// (f × g) images of every generator and probe of src are members of dst.
Verdict mapsInto(const EAMap& f, const EAMap& g, const StructurePtr& src,
                 const StructurePtr& dst, std::uint64_t budget);

// f is locally proper for every generator and probe of src.
Verdict locallyProperOn(const EAMap& f, const StructurePtr& src, std::uint64_t budget);

}  // namespace crs::detail
