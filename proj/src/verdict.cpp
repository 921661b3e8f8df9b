#include "crs/verdict.hpp"

#include <sstream>

namespace crs {

std::string Verdict::toString() const {
    std::ostringstream os;
    os << stateName() << "(" << code;
    if (pairWitness) {
        os << "; pair=(" << pairWitness->first.toString() << ", " << pairWitness->second.toString() << ")";
    }
    if (improperWitness) {
        os << "; improper=" << improperWitness->point.toString() << "/proj" << improperWitness->projection;
    }
    if (!shearWitness.empty()) {
        os << "; shear=" << shearWitness.front().toString();
    }
    if (state == State::Unknown) {
        os << "; depth=" << exhaustedDepth;
    }
    if (!detail.empty()) {
        os << "; " << detail.dump();
    }
    os << ")";
    return os.str();
}

Verdict allOf(const std::vector<Verdict>& parts, const std::string& code) {
    std::uint64_t depth = 0;
    bool sawUnknown = false;
    for (const auto& p : parts) {
        if (p.out()) return p;
        if (p.unknown()) {
            sawUnknown = true;
            depth = std::max(depth, p.exhaustedDepth);
        }
    }
    if (sawUnknown) return Verdict::dontKnow(depth, code + "-undecided");
    nlohmann::json sub = nlohmann::json::array();
    for (const auto& p : parts) sub.push_back(p.code);
    auto v = Verdict::yes(code);
    v.detail["parts"] = std::move(sub);
    for (const auto& p : parts) {
        for (const auto& r : p.rels) v.rels.push_back(r);
    }
    return v;
}

Verdict anyOf(const std::vector<Verdict>& parts, const std::string& code) {
    std::uint64_t depth = 0;
    bool sawUnknown = false;
    for (const auto& p : parts) {
        if (p.in()) return p;
        if (p.unknown()) {
            sawUnknown = true;
            depth = std::max(depth, p.exhaustedDepth);
        }
    }
    if (sawUnknown) return Verdict::dontKnow(depth, code + "-undecided");
    nlohmann::json sub = nlohmann::json::array();
    for (const auto& p : parts) sub.push_back(p.code);
    auto v = Verdict::no(code);
    v.detail["branches"] = std::move(sub);
    // keep the first branch's witness if any
    for (const auto& p : parts) {
        if (p.pairWitness) { v.pairWitness = p.pairWitness; break; }
    }
    return v;
}

}  // namespace crs
