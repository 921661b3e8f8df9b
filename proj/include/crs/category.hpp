#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crs/coarsemap.hpp"
#include "crs/ground.hpp"
#include "crs/structures.hpp"
#include "crs/verdict.hpp"

namespace crs {

// A ground space together with a coarse structure on it.
struct CoarseSpace {
    Space space;
    StructurePtr structure;

    // Space taken from the descriptor.
    static CoarseSpace of(StructurePtr d);
};

// ---------------------------------------------------------------------------
// Arrow conditions
// ---------------------------------------------------------------------------

// Report of the two coarse-map conditions for f : Y -> X, each quantified
// over the generators and probe family of the source structure.
struct ArrowCheck {
    EAMap map;
    CoarseSpace source, target;
    Verdict locallyProper;
    Verdict preserves;

    bool coarse() const { return locallyProper.in() && preserves.in(); }
    Verdict overall() const;
};

ArrowCheck checkCoarse(const EAMap& f, const CoarseSpace& Y, const CoarseSpace& X,
                       std::uint64_t budget = 8);

// Closeness of two coarse maps Y -> X: every mixed pair image (f x g)(F)
// stays a member of the target structure. Throws NotCoarse when either map
// fails checkCoarse.
Verdict checkClose(const EAMap& f, const EAMap& g, const CoarseSpace& Y,
                   const CoarseSpace& X, std::uint64_t budget = 8);

// ---------------------------------------------------------------------------
// Colimit-side constructions
// ---------------------------------------------------------------------------

struct CoproductResult {
    CoarseSpace object;            // disjoint union with summand-local structure
    std::vector<EAMap> injections; // one per summand
};
// Component ids are prefixed with "c<i>." only when they collide.
CoproductResult coproduct(const std::vector<CoarseSpace>& summands);

struct EqualizerResult {
    CoarseSpace object;  // ambient space = Y.space; structure vanishes off carrier
    PointSet carrier;    // { y : f(y) connected to g(y) in X }
    EAMap inclusion;     // identity-as-set into Y
};
EqualizerResult equalizer(const EAMap& f, const EAMap& g, const CoarseSpace& Y,
                          const CoarseSpace& X, std::uint64_t budget = 8);

struct CoequalizerResult {
    CoarseSpace object;  // carrier X.space, structure joined with pushed generators
    EAMap map;           // identity-as-set X -> object
};
// Throws UnsupportedShear when a pushed generator has no band/rectangle form.
CoequalizerResult coequalizer(const EAMap& f, const EAMap& g, const CoarseSpace& Y,
                              const CoarseSpace& X, std::uint64_t budget = 8,
                              std::uint64_t depth = 3);

struct PushoutResult {
    CoarseSpace object;
    EAMap fromX, fromY;
};
PushoutResult pushout(const EAMap& f, const EAMap& g, const CoarseSpace& Z,
                      const CoarseSpace& X, const CoarseSpace& Y,
                      std::uint64_t budget = 8, std::uint64_t depth = 3);

// A finite diagram of coarse spaces and arrows between them.
struct Diagram {
    struct Arrow {
        std::size_t src = 0, dst = 0;
        EAMap map;
    };
    std::vector<CoarseSpace> objects;
    std::vector<Arrow> arrows;
};

struct DiagramCone {
    CoarseSpace object;
    std::vector<EAMap> legs;  // one per diagram object
};

// Iterated coproduct + coequalizer.
DiagramCone colimitFinite(const Diagram& d, std::uint64_t budget = 8,
                          std::uint64_t depth = 3);
// Only single objects and terminated-factor shapes are in fragment; anything
// else throws UnsupportedProduct.
DiagramCone limitFinite(const Diagram& d, std::uint64_t budget = 8);

// ---------------------------------------------------------------------------
// Quotients and functors
// ---------------------------------------------------------------------------

struct QuotientResult {
    CoarseSpace object;  // X.space with the quotient structure
    EAMap map;           // identity-as-set
};
// Throws NotUnitalSubspace unless 1_y is a member of X.structure.
QuotientResult quotient(const CoarseSpace& X, const PointSet& y);

CoarseSpace terminate(const CoarseSpace& X);
// Identity-as-set X -> Terminate(X).
EAMap tau(const CoarseSpace& X);
// A map between terminations is the same set map.
EAMap terminateMap(const EAMap& f);

CoarseSpace connect(const CoarseSpace& X);

struct AddPtResult {
    CoarseSpace object;  // X plus one fresh point component, connected
    EAMap inclusion;     // X -> object
    Point added;
};
AddPtResult addPt(const CoarseSpace& X, const std::string& ptId = "pt.added");

// ---------------------------------------------------------------------------
// Terminated-factor products
// ---------------------------------------------------------------------------

struct TerminatedProductResult {
    CoarseSpace object;  // = Y
    EAMap projY;         // identity on Y
    EAMap projT;         // a coarse map Y -> T
};
// T.structure must be Terminal or a Termination. When toT is absent a
// componentwise interleaving injection is constructed; throws
// NoMapToTerminated when none exists.
TerminatedProductResult productWithTerminated(const CoarseSpace& T, const CoarseSpace& Y,
                                              std::optional<EAMap> toT = std::nullopt,
                                              std::uint64_t budget = 8);

// ---------------------------------------------------------------------------
// Image factorization and arrow classification
// ---------------------------------------------------------------------------

// { x : x is connected to some point of f(Y) in X.structure }.
PointSet connectedHull(const EAMap& f, const CoarseSpace& Y, const CoarseSpace& X,
                       std::uint64_t budget = 8);

struct ImageResult {
    CoarseSpace object;  // carrier Y.space with the pulled-back structure
    EAMap arrow;         // object -> X (the map f itself)
    Verdict monic;
};
ImageResult image(const EAMap& f, const CoarseSpace& Y, const CoarseSpace& X,
                  std::uint64_t budget = 8);

struct CoimageResult {
    CoarseSpace object;  // ambient X.space; structure supported on the hull
    PointSet carrier;    // the connected hull
    EAMap arrow;         // Y -> object (the map f itself)
    Verdict epi;
};
CoimageResult coimage(const EAMap& f, const CoarseSpace& Y, const CoarseSpace& X,
                      std::uint64_t budget = 8, std::uint64_t depth = 3);

Verdict isMonic(const EAMap& f, const CoarseSpace& Y, const CoarseSpace& X,
                std::uint64_t budget = 8);
Verdict isEpi(const EAMap& f, const CoarseSpace& Y, const CoarseSpace& X,
              std::uint64_t budget = 8, std::uint64_t depth = 3);

// ---------------------------------------------------------------------------
// Equivalences and termination order
// ---------------------------------------------------------------------------

// f : X -> Y and g : Y -> X are mutually inverse up to closeness.
Verdict equivalenceWitness(const CoarseSpace& X, const CoarseSpace& Y, const EAMap& f,
                           const EAMap& g, std::uint64_t budget = 8);

// X admits a coarse injection into the terminated space R (R.structure must
// be Terminal or a Termination); decided via an interleaving injection.
Verdict terminates(const CoarseSpace& X, const CoarseSpace& R, std::uint64_t budget = 8);

// ---------------------------------------------------------------------------
// Universal-property verification
// ---------------------------------------------------------------------------

struct Cone {
    CoarseSpace apex;
    std::vector<EAMap> legs;
};

struct ConeReport {
    Verdict exists;  // some mediator satisfies the cone conditions
    Verdict unique;  // all mediators found are pairwise close
    std::optional<EAMap> mediator;
};

// Product cone: legs = { apex -> T, apex -> Y }.
ConeReport verifyCone(const TerminatedProductResult& prod, const CoarseSpace& T,
                      const Cone& cone, std::uint64_t budget = 8);
// Equalizer cone: legs = { apex -> Y } with f∘leg close to g∘leg.
ConeReport verifyCone(const EqualizerResult& eq, const EAMap& f, const EAMap& g,
                      const CoarseSpace& Y, const CoarseSpace& X, const Cone& cone,
                      std::uint64_t budget = 8);
// Coproduct cocone: legs = { summand_j -> apex }.
ConeReport verifyCone(const CoproductResult& cp, const std::vector<CoarseSpace>& summands,
                      const Cone& cocone, std::uint64_t budget = 8);

}  // namespace crs
