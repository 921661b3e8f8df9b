#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crs/coarsemap.hpp"
#include "crs/entourage.hpp"
#include "crs/ground.hpp"

namespace crs {

// Three-valued answer to a decidable-or-searched question.  `In` carries a
// checkable certificate (a tag plus structured data and, when useful, the
// concrete relations the certificate is built from).  `Out` carries a witness
// that falsifies a necessary condition.  `Unknown` is reserved for bounded
// searches that ran out of depth; closed-form decisions never produce it.
struct Verdict {
    enum class State { In, Out, Unknown };

    State state = State::Unknown;

    // Machine-readable tag describing the certificate or witness shape,
    // e.g. "proper", "width-bound", "cross-cluster-pair", "search-exhausted".
    std::string code;

    // Structured payload: bounds, distances, indices, sub-reports.
    nlohmann::json detail = nlohmann::json::object();

    // Optional typed payloads referenced by the certificate or witness.
    std::optional<std::pair<Point, Point>> pairWitness;
    std::optional<ImproperWitness> improperWitness;
    std::vector<Relation> rels;
    std::vector<ShearPiece> shearWitness;

    // For Unknown: the depth/budget at which the search gave up.
    std::uint64_t exhaustedDepth = 0;

    bool in() const { return state == State::In; }
    bool out() const { return state == State::Out; }
    bool unknown() const { return state == State::Unknown; }

    static Verdict yes(std::string code, nlohmann::json detail = nlohmann::json::object()) {
        Verdict v;
        v.state = State::In;
        v.code = std::move(code);
        v.detail = std::move(detail);
        return v;
    }
    static Verdict no(std::string code, nlohmann::json detail = nlohmann::json::object()) {
        Verdict v;
        v.state = State::Out;
        v.code = std::move(code);
        v.detail = std::move(detail);
        return v;
    }
    static Verdict dontKnow(std::uint64_t depth, std::string code = "search-exhausted") {
        Verdict v;
        v.state = State::Unknown;
        v.code = std::move(code);
        v.exhaustedDepth = depth;
        return v;
    }

    Verdict&& withPair(Point a, Point b) && {
        pairWitness = std::pair<Point, Point>{std::move(a), std::move(b)};
        return std::move(*this);
    }
    Verdict&& withImproper(ImproperWitness w) && {
        improperWitness = std::move(w);
        return std::move(*this);
    }
    Verdict&& withRel(Relation r) && {
        rels.push_back(std::move(r));
        return std::move(*this);
    }
    Verdict&& withShear(ShearPiece s) && {
        shearWitness.push_back(std::move(s));
        return std::move(*this);
    }

    std::string stateName() const {
        switch (state) {
            case State::In: return "In";
            case State::Out: return "Out";
            default: return "Unknown";
        }
    }
    std::string toString() const;
};

// Conjunction: the first Out dominates; otherwise any Unknown makes the
// result Unknown (deepest exhausted depth kept); otherwise In with `code`.
Verdict allOf(const std::vector<Verdict>& parts, const std::string& code);

// Disjunction: the first In dominates; otherwise any Unknown makes the result
// Unknown; otherwise Out with `code` (detail collects the branch codes).
Verdict anyOf(const std::vector<Verdict>& parts, const std::string& code);

}  // namespace crs
