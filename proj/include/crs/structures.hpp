#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crs/coarsemap.hpp"
#include "crs/entourage.hpp"
#include "crs/geometry.hpp"
#include "crs/ground.hpp"
#include "crs/upset.hpp"
#include "crs/verdict.hpp"

namespace crs {

class StructureDescr;
using StructurePtr = std::shared_ptr<const StructureDescr>;

// A coarse structure on a ground space, described by a constructor tree.
// Leaves are the closed-form catalog entries; inner nodes derive structures
// from parents. Membership of a relation is decided per constructor; only
// bounded searches (Join, pushed ideals) can answer Unknown.
class StructureDescr {
 public:
    enum class Kind {
        Terminal,                // all proper relations
        Metric,                  // bounded width w.r.t. a path geometry
        Initial,                 // subsets of 1_S for finite S
        InitialConnected,        // all finite relations
        InitialUnital,           // subsets of 1_X
        InitialConnectedUnital,  // subsets of 1_X ∪ finite
        Subspace,                // members of parent contained in S × S
        Pullback,                // f-preimages: (f×f)(E) ∈ parent, restriction proper
        EqPullback,              // pullback along f and f' plus mixed pairs
        Termination,             // proper members whose supports are unital in parent
        Ideal,                   // members of parent with supports near S
        Quotient,                // parent enlarged by proper pieces supported near Y
        Join,                    // generated by parent plus extra relations (bounded search)
        Connected,               // parent enlarged by finite perturbations
        Coproduct,               // summand-local membership on a disjoint union
        Meet                     // members of both operands
    };

    static StructurePtr terminal(Space sp);
    static StructurePtr metric(MetricGeom geom);
    // Metric with every component its own cluster.
    static StructurePtr metricDiscrete(const Space& sp);
    static StructurePtr initial(Space sp);
    static StructurePtr initialConnected(Space sp);
    static StructurePtr initialUnital(Space sp);
    static StructurePtr initialConnectedUnital(Space sp);
    static StructurePtr subspace(StructurePtr parent, PointSet s);
    // parent lives over f.target(); the result lives over f.source().
    static StructurePtr pullback(EAMap f, StructurePtr parent);
    static StructurePtr eqPullback(EAMap f, EAMap g, StructurePtr parent);
    static StructurePtr termination(StructurePtr parent);
    static StructurePtr ideal(StructurePtr parent, PointSet s);
    // Throws NotUnitalSubspace unless 1_Y is a member of the parent.
    static StructurePtr quotient(StructurePtr parent, PointSet y);
    static StructurePtr join(StructurePtr parent, std::vector<Relation> gens,
                             std::uint64_t depth);
    static StructurePtr connected(StructurePtr parent);
    // Component ids of the summand spaces must be pairwise distinct; the
    // result lives over their concatenation.
    static StructurePtr coproductOf(std::vector<StructurePtr> summands);
    static StructurePtr meet(StructurePtr a, StructurePtr b);

    Kind kind() const { return kind_; }
    const Space& space() const { return space_; }

    const MetricGeom& geom() const;
    const StructurePtr& parent() const;
    const StructurePtr& parent2() const;
    const PointSet& set() const;
    const EAMap& mapF() const;
    const EAMap& mapG() const;
    const std::vector<Relation>& joinGens() const;
    std::uint64_t joinDepth() const;
    const std::vector<StructurePtr>& summands() const;

    // Structural (tree) equality of descriptors.
    bool sameShape(const StructureDescr& o) const;
    std::string toString() const;
    std::string kindName() const;

 private:
    StructureDescr() = default;

    Kind kind_ = Kind::Terminal;
    Space space_;
    std::optional<MetricGeom> geom_;
    StructurePtr parent_, parent2_;
    PointSet set_;
    std::optional<EAMap> f_, g_;
    std::vector<Relation> joinGens_;
    std::uint64_t joinDepth_ = 0;
    std::vector<StructurePtr> summands_;
};

bool sameStructureShape(const StructurePtr& a, const StructurePtr& b);

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

// Is e a member of d? In verdicts carry a certificate; Out a witness.
Verdict contains(const StructurePtr& d, const Relation& e);

// Membership for a symbolic relation (pair image with possible shears).
Verdict containsSym(const StructurePtr& d, const SymRelation& s);

// Membership of the exact image (f × g)(F) in d; d lives over the common
// target of f and g, F over their common source.
Verdict containsPair(const StructurePtr& d, const EAMap& f, const EAMap& g,
                     const Relation& F);

// ---------------------------------------------------------------------------
// Derived predicates
// ---------------------------------------------------------------------------

Verdict isUnital(const StructurePtr& d);                       // 1_X ∈ d
Verdict unitalSubspace(const StructurePtr& d, const PointSet& s);  // 1_S ∈ d
Verdict connectedPts(const StructurePtr& d, const Point& a, const Point& b);
Verdict isConnected(const StructurePtr& d);  // all point pairs connected

// Nearness of supports: ∃ E ∈ d with S ⊆ E·T.
Verdict nearSupport(const StructurePtr& d, const PointSet& s, const PointSet& t);

// ---------------------------------------------------------------------------
// Generating data
// ---------------------------------------------------------------------------

// A finite family of members of d covering it up to the budget: unions of
// generator subsets exhaust the members whose shape parameters (offsets,
// indices) stay within the budget.
std::vector<Relation> generators(const StructurePtr& d, std::uint64_t budget);

// Canonical unbounded member probes of d (possibly sheared); used to separate
// structures and to complete coarse-map checks on width-unbounded sources.
std::vector<SymRelation> probeFamily(const StructurePtr& d, std::uint64_t budget);

// σ-unital filtration: a nondecreasing chain of unital subspaces such that
// every unital subspace of d is absorbed by some level; `levels` entries.
// nullopt when the catalog has no filtration form for d.
std::optional<std::vector<PointSet>> sigmaUnitalFiltration(const StructurePtr& d,
                                                           std::size_t levels);

// ---------------------------------------------------------------------------
// Comparison and normalization
// ---------------------------------------------------------------------------

// Membership-preserving simplification of the descriptor tree.
StructurePtr normalizeStructure(const StructurePtr& d);

// Every member of a is a member of b. Out carries a separating member of a
// (relation or shear probe). Unknown only when the probe search exhausts.
Verdict structureLeq(const StructurePtr& a, const StructurePtr& b, std::uint64_t budget);
Verdict structureEq(const StructurePtr& a, const StructurePtr& b, std::uint64_t budget);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

// A parametrized point: i ↦ value (constant) or i ↦ (ray, a·i + b).
struct Trajectory {
    bool isConst = true;
    Point value;       // constant case
    std::string ray;   // affine case
    std::uint64_t a = 1;
    std::int64_t b = 0;

    static Trajectory constant(Point p);
    static Trajectory affine(std::string ray, std::uint64_t a, std::int64_t b);
    // Valid for parameters with a·i + b >= 0.
    Point at(std::uint64_t i) const;
    std::uint64_t firstValid() const;  // least i with a·i + b >= 0 (0 for const)
};

// { i ∈ domain : (u(i), v(i)) ∈ r }, exactly.
UPSet trajPairMemberSet(const Relation& r, const Trajectory& u, const Trajectory& v,
                        const UPSet& domain);

// { i ∈ domain : u(i) ∈ s }, exactly.
UPSet trajMemberSet(const PointSet& s, const Trajectory& u, const UPSet& domain);

// { i ∈ domain : u(i) and v(i) are connected points of d }. Exact for the
// catalog; for Join parents the answer is the bounded-search approximation
// (subset of the true set).
UPSet connectedIndexSet(const StructurePtr& d, const Trajectory& u, const Trajectory& v,
                        const UPSet& domain);

// ---------------------------------------------------------------------------
// Metric helpers shared by nearness and category constructions
// ---------------------------------------------------------------------------

// Points within distance r of s in the given geometry.
PointSet ballAround(const MetricGeom& geom, const PointSet& s, std::uint64_t r);

// sup_{x ∈ s} d(x, t); nullopt when infinite. Empty s gives 0.
std::optional<std::uint64_t> supPointSetDistance(const MetricGeom& geom,
                                                 const PointSet& s, const PointSet& t);

}  // namespace crs
