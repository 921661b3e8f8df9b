#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crs/category.hpp"

namespace crs {

// ---------------------------------------------------------------------------
// Finite coarse spaces
// ---------------------------------------------------------------------------

// On a finite carrier every coarse structure is the downset of (the graph of)
// an equivalence relation, so a partition of {0, …, n−1} is the normal form.
// Blocks are canonical: sorted internally and ordered by least element.
struct FinSpace {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> partition;

    // Validates that `blocks` partition {0, …, n−1}; canonicalizes.
    static FinSpace of(std::size_t n, std::vector<std::vector<std::size_t>> blocks);
    static FinSpace discrete(std::size_t n);
    static FinSpace indiscrete(std::size_t n);

    std::size_t blockOf(std::size_t x) const;  // throws InvalidArgument out of range
    bool related(std::size_t x, std::size_t y) const;
    std::size_t blockCount() const { return partition.size(); }

    bool operator==(const FinSpace&) const = default;
    std::string toString() const;
};

// A total map between finite carriers.
struct FinMap {
    std::size_t srcSize = 0, dstSize = 0;
    std::vector<std::size_t> values;  // values[x] < dstSize

    static FinMap of(std::size_t srcSize, std::size_t dstSize,
                     std::vector<std::size_t> values);
    static FinMap identity(std::size_t n);
    static FinMap constant(std::size_t srcSize, std::size_t dstSize, std::size_t value);

    std::size_t operator()(std::size_t x) const;

    bool operator==(const FinMap&) const = default;
    std::string toString() const;
};

// f ∘ g (g applied first).
FinMap finCompose(const FinMap& f, const FinMap& g);

// A finite entourage: an explicit set of pairs on one carrier.
using FinRelation = std::vector<std::pair<std::size_t, std::size_t>>;

// ---------------------------------------------------------------------------
// Membership, arrows, closeness
// ---------------------------------------------------------------------------

// Every pair of e lies inside one block.
bool finContains(const FinSpace& s, const FinRelation& e);

// Coarse map condition; local properness is vacuous on finite carriers.
bool finCoarse(const FinMap& f, const FinSpace& src, const FinSpace& dst);

// Pointwise nearness in the target partition (f and g share a source).
bool finClose(const FinSpace& target, const FinMap& f, const FinMap& g);

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

struct FinProductResult {
    FinSpace object;  // pair (x, y) at index x · b.n + y
    FinMap projA, projB;
};
FinProductResult finProduct(const FinSpace& a, const FinSpace& b);

struct FinCoproductResult {
    FinSpace object;  // a's points first, then b's shifted by a.n
    FinMap injA, injB;
};
FinCoproductResult finCoproduct(const FinSpace& a, const FinSpace& b);

struct FinEqualizerResult {
    FinSpace object;                   // carrier points with the restricted partition
    std::vector<std::size_t> carrier;  // indices y with f(y) ~ g(y), ascending
    FinMap inclusion;                  // object -> y
};
// Throws NotCoarse unless both maps are coarse y -> x.
FinEqualizerResult finEqualizer(const FinMap& f, const FinMap& g, const FinSpace& y,
                                const FinSpace& x);

struct FinCoequalizerResult {
    FinSpace object;  // x's carrier with the joined partition
    FinMap map;       // identity-as-set x -> object
};
// Throws NotCoarse unless both maps are coarse y -> x.
FinCoequalizerResult finCoequalizer(const FinMap& f, const FinMap& g, const FinSpace& y,
                                    const FinSpace& x);

struct FinPushoutResult {
    FinSpace object;
    FinMap fromA, fromB;
};
FinPushoutResult finPushout(const FinMap& f, const FinMap& g, const FinSpace& z,
                            const FinSpace& a, const FinSpace& b);

struct FinDiagram {
    struct Arrow {
        std::size_t src = 0, dst = 0;
        FinMap map;
    };
    std::vector<FinSpace> objects;
    std::vector<Arrow> arrows;
};

struct FinCone {
    FinSpace object;
    std::vector<FinMap> legs;  // one per diagram object
};

// Iterated products and equalizers / coproducts and coequalizers.
FinCone finLimit(const FinDiagram& d);
FinCone finColimit(const FinDiagram& d);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

// Monic iff the induced map on blocks is injective.
bool finIsMonic(const FinMap& f, const FinSpace& y, const FinSpace& x);
// Epi iff the image meets every block of the target.
bool finIsEpi(const FinMap& f, const FinSpace& y, const FinSpace& x);
// Invertible up to closeness (exhaustive inverse search; throws SizeBound
// beyond 8 points).
bool finIsEquivalence(const FinMap& f, const FinSpace& y, const FinSpace& x);

// ---------------------------------------------------------------------------
// Universal-property oracles
// ---------------------------------------------------------------------------

// Each oracle enumerates every apex partition on 1..maxApex points and every
// coarse (co)cone over it, verifies that the canonical mediator satisfies the
// cone conditions, and verifies uniqueness through the pointwise block
// characterization of closeness (full enumeration happens only to extract a
// counterexample). Inputs of more than 5 points (or maxApex > 5) throw
// SizeBound.
struct FinOracleReport {
    bool holds = true;
    std::uint64_t conesChecked = 0;
    std::string counterexample;  // empty when holds
};

FinOracleReport finProductUniversal(const FinSpace& a, const FinSpace& b,
                                    std::size_t maxApex = 3);
FinOracleReport finCoproductUniversal(const FinSpace& a, const FinSpace& b,
                                      std::size_t maxApex = 3);
FinOracleReport finEqualizerUniversal(const FinMap& f, const FinMap& g, const FinSpace& y,
                                      const FinSpace& x, std::size_t maxApex = 3);
FinOracleReport finCoequalizerUniversal(const FinMap& f, const FinMap& g,
                                        const FinSpace& y, const FinSpace& x,
                                        std::size_t maxApex = 3);
FinOracleReport finPushoutUniversal(const FinMap& f, const FinMap& g, const FinSpace& z,
                                    const FinSpace& a, const FinSpace& b,
                                    std::size_t maxApex = 3);

// ---------------------------------------------------------------------------
// Enumeration helpers (exhaustive testing)
// ---------------------------------------------------------------------------

// All set partitions of {0, …, n−1}, canonical form.
std::vector<FinSpace> allPartitions(std::size_t n);
// All maps {0, …, srcSize−1} -> {0, …, dstSize−1}.
std::vector<FinMap> allMaps(std::size_t srcSize, std::size_t dstSize);

// ---------------------------------------------------------------------------
// Cross-backend embedding
// ---------------------------------------------------------------------------

// Realize a finite space over point components "<prefix>0" … with a glued
// metric: one cluster per block.
CoarseSpace finEmbed(const FinSpace& s, const std::string& prefix = "q");
// The matching map between embedded carriers.
EAMap finMapEmbed(const FinMap& f, const CoarseSpace& src, const CoarseSpace& dst);
// The matching relation over an embedded carrier.
Relation finRelationEmbed(const FinRelation& e, const CoarseSpace& host);

}  // namespace crs
