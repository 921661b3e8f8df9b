#include "crs/finite.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "crs/errors.hpp"

namespace crs {

namespace {

constexpr std::size_t kOracleBound = 5;
constexpr std::size_t kInverseSearchBound = 8;

std::size_t findRoot(std::vector<std::size_t>& up, std::size_t x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
}

FinSpace fromAssignment(std::size_t n, const std::vector<std::size_t>& cls,
                        std::size_t classCount) {
    std::vector<std::vector<std::size_t>> blocks(classCount);
    for (std::size_t x = 0; x < n; ++x) blocks[cls[x]].push_back(x);
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                [](const auto& b) { return b.empty(); }),
                 blocks.end());
    return FinSpace::of(n, std::move(blocks));
}

}  // namespace

// ---------------------------------------------------------------------------
// FinSpace / FinMap
// ---------------------------------------------------------------------------

FinSpace FinSpace::of(std::size_t n, std::vector<std::vector<std::size_t>> blocks) {
    std::vector<bool> seen(n, false);
    for (auto& b : blocks) {
        if (b.empty()) throw InvalidArgument("partition block must be nonempty");
        for (std::size_t x : b) {
            if (x >= n) throw InvalidArgument("partition element out of range");
            if (seen[x]) throw InvalidArgument("partition element repeated");
            seen[x] = true;
        }
        std::sort(b.begin(), b.end());
    }
    for (std::size_t x = 0; x < n; ++x)
        if (!seen[x]) throw InvalidArgument("partition misses an element");
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    FinSpace s;
    s.n = n;
    s.partition = std::move(blocks);
    return s;
}

FinSpace FinSpace::discrete(std::size_t n) {
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t x = 0; x < n; ++x) blocks.push_back({x});
    return of(n, std::move(blocks));
}

FinSpace FinSpace::indiscrete(std::size_t n) {
    if (n == 0) return of(0, {});
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return of(n, {std::move(all)});
}

std::size_t FinSpace::blockOf(std::size_t x) const {
    if (x >= n) throw InvalidArgument("point out of range");
    for (std::size_t b = 0; b < partition.size(); ++b)
        if (std::binary_search(partition[b].begin(), partition[b].end(), x)) return b;
    throw InvalidArgument("point missing from partition");  // unreachable on valid data
}

bool FinSpace::related(std::size_t x, std::size_t y) const {
    return blockOf(x) == blockOf(y);
}

std::string FinSpace::toString() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t b = 0; b < partition.size(); ++b) {
        if (b) os << " | ";
        for (std::size_t k = 0; k < partition[b].size(); ++k) {
            if (k) os << ' ';
            os << partition[b][k];
        }
    }
    os << '}';
    return os.str();
}

FinMap FinMap::of(std::size_t srcSize, std::size_t dstSize,
                  std::vector<std::size_t> values) {
    if (values.size() != srcSize) throw InvalidArgument("map arity mismatch");
    for (std::size_t v : values)
        if (v >= dstSize) throw InvalidArgument("map value out of range");
    FinMap f;
    f.srcSize = srcSize;
    f.dstSize = dstSize;
    f.values = std::move(values);
    return f;
}

FinMap FinMap::identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return of(n, n, std::move(v));
}

FinMap FinMap::constant(std::size_t srcSize, std::size_t dstSize, std::size_t value) {
    if (value >= dstSize) throw InvalidArgument("constant value out of range");
    return of(srcSize, dstSize, std::vector<std::size_t>(srcSize, value));
}

std::size_t FinMap::operator()(std::size_t x) const {
    if (x >= srcSize) throw InvalidArgument("map argument out of range");
    return values[x];
}

std::string FinMap::toString() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t x = 0; x < values.size(); ++x) {
        if (x) os << ' ';
        os << values[x];
    }
    os << ']';
    return os.str();
}

FinMap finCompose(const FinMap& f, const FinMap& g) {
    if (g.dstSize != f.srcSize) throw SpaceMismatch("composition arity mismatch");
    std::vector<std::size_t> v(g.srcSize);
    for (std::size_t x = 0; x < g.srcSize; ++x) v[x] = f(g(x));
    return FinMap::of(g.srcSize, f.dstSize, std::move(v));
}

// ---------------------------------------------------------------------------
// Membership, arrows, closeness
// ---------------------------------------------------------------------------

bool finContains(const FinSpace& s, const FinRelation& e) {
    for (const auto& [x, y] : e)
        if (!s.related(x, y)) return false;
    return true;
}

bool finCoarse(const FinMap& f, const FinSpace& src, const FinSpace& dst) {
    if (f.srcSize != src.n || f.dstSize != dst.n)
        throw SpaceMismatch("map does not fit the given spaces");
    for (const auto& block : src.partition)
        for (std::size_t k = 1; k < block.size(); ++k)
            if (!dst.related(f(block[0]), f(block[k]))) return false;
    return true;
}

bool finClose(const FinSpace& target, const FinMap& f, const FinMap& g) {
    if (f.srcSize != g.srcSize || f.dstSize != target.n || g.dstSize != target.n)
        throw SpaceMismatch("closeness requires a common source and target");
    for (std::size_t x = 0; x < f.srcSize; ++x)
        if (!target.related(f(x), g(x))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

FinProductResult finProduct(const FinSpace& a, const FinSpace& b) {
    const std::size_t n = a.n * b.n;
    std::vector<std::vector<std::size_t>> blocks;
    for (const auto& ba : a.partition)
        for (const auto& bb : b.partition) {
            std::vector<std::size_t> blk;
            for (std::size_t x : ba)
                for (std::size_t y : bb) blk.push_back(x * b.n + y);
            blocks.push_back(std::move(blk));
        }
    std::vector<std::size_t> pa(n), pb(n);
    for (std::size_t i = 0; i < n; ++i) {
        pa[i] = i / b.n;
        pb[i] = i % b.n;
    }
    return {FinSpace::of(n, std::move(blocks)), FinMap::of(n, a.n, std::move(pa)),
            FinMap::of(n, b.n, std::move(pb))};
}

FinCoproductResult finCoproduct(const FinSpace& a, const FinSpace& b) {
    const std::size_t n = a.n + b.n;
    std::vector<std::vector<std::size_t>> blocks = a.partition;
    for (const auto& bb : b.partition) {
        std::vector<std::size_t> blk;
        for (std::size_t y : bb) blk.push_back(a.n + y);
        blocks.push_back(std::move(blk));
    }
    std::vector<std::size_t> ia(a.n), ib(b.n);
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), a.n);
    return {FinSpace::of(n, std::move(blocks)), FinMap::of(a.n, n, std::move(ia)),
            FinMap::of(b.n, n, std::move(ib))};
}

namespace {
void requireFinCoarse(const FinMap& f, const FinSpace& src, const FinSpace& dst,
                      const char* role) {
    if (!finCoarse(f, src, dst))
        throw NotCoarse(std::string(role) + " map is not coarse");
}

// Restriction of a partition to an ascending carrier, reindexed 0..k-1.
FinSpace restrictTo(const FinSpace& s, const std::vector<std::size_t>& carrier) {
    std::vector<std::vector<std::size_t>> blocks;
    for (const auto& block : s.partition) {
        std::vector<std::size_t> blk;
        for (std::size_t j = 0; j < carrier.size(); ++j)
            if (std::binary_search(block.begin(), block.end(), carrier[j]))
                blk.push_back(j);
        if (!blk.empty()) blocks.push_back(std::move(blk));
    }
    return FinSpace::of(carrier.size(), std::move(blocks));
}
}  // namespace

FinEqualizerResult finEqualizer(const FinMap& f, const FinMap& g, const FinSpace& y,
                                const FinSpace& x) {
    requireFinCoarse(f, y, x, "equalizer left");
    requireFinCoarse(g, y, x, "equalizer right");
    std::vector<std::size_t> carrier;
    for (std::size_t v = 0; v < y.n; ++v)
        if (x.related(f(v), g(v))) carrier.push_back(v);
    FinSpace object = restrictTo(y, carrier);
    FinMap inclusion = FinMap::of(carrier.size(), y.n, carrier);
    return {std::move(object), std::move(carrier), std::move(inclusion)};
}

FinCoequalizerResult finCoequalizer(const FinMap& f, const FinMap& g, const FinSpace& y,
                                    const FinSpace& x) {
    requireFinCoarse(f, y, x, "coequalizer left");
    requireFinCoarse(g, y, x, "coequalizer right");
    std::vector<std::size_t> up(x.n);
    std::iota(up.begin(), up.end(), 0);
    for (const auto& block : x.partition)
        for (std::size_t k = 1; k < block.size(); ++k)
            up[findRoot(up, block[k])] = findRoot(up, block[0]);
    for (std::size_t v = 0; v < y.n; ++v)
        up[findRoot(up, f(v))] = findRoot(up, g(v));
    std::vector<std::size_t> cls(x.n), classIndex(x.n, x.n);
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.n; ++i) {
        const std::size_t r = findRoot(up, i);
        if (classIndex[r] == x.n) classIndex[r] = count++;
        cls[i] = classIndex[r];
    }
    return {fromAssignment(x.n, cls, count), FinMap::identity(x.n)};
}

FinPushoutResult finPushout(const FinMap& f, const FinMap& g, const FinSpace& z,
                            const FinSpace& a, const FinSpace& b) {
    requireFinCoarse(f, z, a, "pushout left");
    requireFinCoarse(g, z, b, "pushout right");
    const FinCoproductResult cp = finCoproduct(a, b);
    const FinCoequalizerResult glued = finCoequalizer(
        finCompose(cp.injA, f), finCompose(cp.injB, g), z, cp.object);
    return {glued.object, finCompose(glued.map, cp.injA), finCompose(glued.map, cp.injB)};
}

namespace {
void validateDiagram(const FinDiagram& d) {
    for (const auto& ar : d.arrows) {
        if (ar.src >= d.objects.size() || ar.dst >= d.objects.size())
            throw InvalidArgument("diagram arrow endpoint out of range");
        requireFinCoarse(ar.map, d.objects[ar.src], d.objects[ar.dst], "diagram");
    }
}
}  // namespace

FinCone finLimit(const FinDiagram& d) {
    validateDiagram(d);
    // Iterated product with projection legs.
    FinSpace object = FinSpace::indiscrete(1);
    std::vector<FinMap> legs;
    for (std::size_t i = 0; i < d.objects.size(); ++i) {
        const FinProductResult p = finProduct(object, d.objects[i]);
        for (FinMap& leg : legs) leg = finCompose(leg, p.projA);
        legs.push_back(p.projB);
        object = p.object;
    }
    // Cut down by each arrow's agreement carrier.
    for (const auto& ar : d.arrows) {
        std::vector<std::size_t> carrier;
        for (std::size_t p = 0; p < object.n; ++p)
            if (d.objects[ar.dst].related(ar.map(legs[ar.src](p)), legs[ar.dst](p)))
                carrier.push_back(p);
        const FinSpace cut = restrictTo(object, carrier);
        const FinMap inclusion = FinMap::of(carrier.size(), object.n, carrier);
        for (FinMap& leg : legs) leg = finCompose(leg, inclusion);
        object = cut;
    }
    return {std::move(object), std::move(legs)};
}

FinCone finColimit(const FinDiagram& d) {
    validateDiagram(d);
    FinSpace object = FinSpace::discrete(0);
    std::vector<FinMap> legs;
    for (const FinSpace& s : d.objects) {
        const FinCoproductResult c = finCoproduct(object, s);
        for (FinMap& leg : legs) leg = finCompose(c.injA, leg);
        legs.push_back(c.injB);
        object = c.object;
    }
    for (const auto& ar : d.arrows) {
        const FinCoequalizerResult glued =
            finCoequalizer(finCompose(legs[ar.dst], ar.map), legs[ar.src],
                           d.objects[ar.src], object);
        for (FinMap& leg : legs) leg = finCompose(glued.map, leg);
        object = glued.object;
    }
    return {std::move(object), std::move(legs)};
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

bool finIsMonic(const FinMap& f, const FinSpace& y, const FinSpace& x) {
    requireFinCoarse(f, y, x, "monic candidate");
    std::vector<bool> hit(x.partition.size(), false);
    for (const auto& block : y.partition) {
        const std::size_t img = x.blockOf(f(block[0]));
        if (hit[img]) return false;
        hit[img] = true;
    }
    return true;
}

bool finIsEpi(const FinMap& f, const FinSpace& y, const FinSpace& x) {
    requireFinCoarse(f, y, x, "epi candidate");
    std::vector<bool> hit(x.partition.size(), false);
    for (std::size_t v = 0; v < y.n; ++v) hit[x.blockOf(f(v))] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

bool finIsEquivalence(const FinMap& f, const FinSpace& y, const FinSpace& x) {
    requireFinCoarse(f, y, x, "equivalence candidate");
    if (y.n > kInverseSearchBound || x.n > kInverseSearchBound)
        throw SizeBound("inverse search supports at most 8 points per space");
    const FinMap idY = FinMap::identity(y.n);
    const FinMap idX = FinMap::identity(x.n);
    for (const FinMap& g : allMaps(x.n, y.n)) {
        if (!finCoarse(g, x, y)) continue;
        if (finClose(y, finCompose(g, f), idY) && finClose(x, finCompose(f, g), idX))
            return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Enumeration helpers
// ---------------------------------------------------------------------------

std::vector<FinSpace> allPartitions(std::size_t n) {
    std::vector<FinSpace> out;
    if (n == 0) {
        out.push_back(FinSpace::of(0, {}));
        return out;
    }
    // Restricted-growth strings: cls[0] = 0, cls[i] <= max(cls[..i-1]) + 1.
    std::vector<std::size_t> cls(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i,
                                                            std::size_t used) {
        if (i == n) {
            out.push_back(fromAssignment(n, cls, used));
            return;
        }
        for (std::size_t c = 0; c <= used; ++c) {
            cls[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    cls[0] = 0;
    rec(1, 1);
    return out;
}

std::vector<FinMap> allMaps(std::size_t srcSize, std::size_t dstSize) {
    std::vector<FinMap> out;
    if (srcSize == 0) {
        out.push_back(FinMap::of(0, dstSize, {}));
        return out;
    }
    if (dstSize == 0) return out;
    std::vector<std::size_t> v(srcSize, 0);
    for (;;) {
        out.push_back(FinMap::of(srcSize, dstSize, v));
        std::size_t k = 0;
        while (k < srcSize && ++v[k] == dstSize) v[k++] = 0;
        if (k == srcSize) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Universal-property oracles
// ---------------------------------------------------------------------------

namespace {

void requireOracleSizes(std::initializer_list<std::size_t> sizes, std::size_t maxApex) {
    for (std::size_t s : sizes)
        if (s > kOracleBound)
            throw SizeBound("universal oracle supports at most 5 points per input space");
    if (maxApex > kOracleBound)
        throw SizeBound("universal oracle supports apexes of at most 5 points");
}

// Failure path: enumerate every coarse mediator satisfying the cone
// conditions; report a non-close pair (uniqueness failure) or absence of any
// satisfier (existence failure). Returns nullopt when the cone's universal
// property actually holds.
std::optional<std::string> enumerateFailure(
    const FinSpace& mediatorSrc, const FinSpace& mediatorDst,
    const std::function<bool(const FinMap&)>& satisfies, const std::string& coneDesc) {
    std::vector<FinMap> sat;
    for (const FinMap& m : allMaps(mediatorSrc.n, mediatorDst.n))
        if (finCoarse(m, mediatorSrc, mediatorDst) && satisfies(m)) sat.push_back(m);
    if (sat.empty()) return "no mediator for cone " + coneDesc;
    for (std::size_t i = 0; i < sat.size(); ++i)
        for (std::size_t j = i + 1; j < sat.size(); ++j)
            if (!finClose(mediatorDst, sat[i], sat[j]))
                return "mediators " + sat[i].toString() + " and " + sat[j].toString() +
                       " are not close for cone " + coneDesc;
    return std::nullopt;
}

// Shared verification step: the canonical mediator must be coarse and
// satisfy the cone; the satisfier set must be characterized pointwise as the
// closeness orbit of the canonical one. Any mismatch falls back to full
// enumeration to decide the cone honestly.
bool verifyCanonicalAndOrbit(
    FinOracleReport& rep, const FinSpace& mediatorSrc, const FinSpace& mediatorDst,
    const FinMap& canonical, const std::function<bool(const FinMap&)>& satisfies,
    const std::function<bool(std::size_t, std::size_t)>& pointwiseCond,
    const std::string& coneDesc) {
    ++rep.conesChecked;
    bool fastPath = finCoarse(canonical, mediatorSrc, mediatorDst) && satisfies(canonical);
    if (fastPath)
        for (std::size_t z = 0; z < mediatorSrc.n && fastPath; ++z)
            for (std::size_t q = 0; q < mediatorDst.n; ++q)
                if (pointwiseCond(z, q) != mediatorDst.related(q, canonical(z))) {
                    fastPath = false;
                    break;
                }
    if (fastPath) return true;
    if (auto bad = enumerateFailure(mediatorSrc, mediatorDst, satisfies, coneDesc)) {
        rep.holds = false;
        rep.counterexample = *bad;
        return false;
    }
    return true;
}

std::string describeLegs(std::initializer_list<const FinMap*> legs) {
    std::string out;
    for (const FinMap* leg : legs) {
        if (!out.empty()) out += ", ";
        out += leg->toString();
    }
    return out;
}

}  // namespace

FinOracleReport finProductUniversal(const FinSpace& a, const FinSpace& b,
                                    std::size_t maxApex) {
    requireOracleSizes({a.n, b.n}, maxApex);
    const FinProductResult p = finProduct(a, b);
    FinOracleReport rep;
    for (std::size_t k = 1; k <= maxApex; ++k)
        for (const FinSpace& w : allPartitions(k))
            for (const FinMap& la : allMaps(k, a.n)) {
                if (!finCoarse(la, w, a)) continue;
                for (const FinMap& lb : allMaps(k, b.n)) {
                    if (!finCoarse(lb, w, b)) continue;
                    std::vector<std::size_t> mv(k);
                    for (std::size_t z = 0; z < k; ++z) mv[z] = la(z) * b.n + lb(z);
                    const FinMap canonical = FinMap::of(k, p.object.n, std::move(mv));
                    auto satisfies = [&](const FinMap& m) {
                        return finClose(a, finCompose(p.projA, m), la) &&
                               finClose(b, finCompose(p.projB, m), lb);
                    };
                    auto cond = [&](std::size_t z, std::size_t q) {
                        return a.related(p.projA(q), la(z)) && b.related(p.projB(q), lb(z));
                    };
                    if (!verifyCanonicalAndOrbit(rep, w, p.object, canonical, satisfies,
                                                 cond, describeLegs({&la, &lb})))
                        return rep;
                }
            }
    return rep;
}

FinOracleReport finCoproductUniversal(const FinSpace& a, const FinSpace& b,
                                      std::size_t maxApex) {
    requireOracleSizes({a.n, b.n}, maxApex);
    const FinCoproductResult c = finCoproduct(a, b);
    FinOracleReport rep;
    for (std::size_t k = 1; k <= maxApex; ++k)
        for (const FinSpace& w : allPartitions(k))
            for (const FinMap& la : allMaps(a.n, k)) {
                if (!finCoarse(la, a, w)) continue;
                for (const FinMap& lb : allMaps(b.n, k)) {
                    if (!finCoarse(lb, b, w)) continue;
                    std::vector<std::size_t> mv(c.object.n);
                    for (std::size_t i = 0; i < a.n; ++i) mv[i] = la(i);
                    for (std::size_t j = 0; j < b.n; ++j) mv[a.n + j] = lb(j);
                    const FinMap canonical = FinMap::of(c.object.n, k, std::move(mv));
                    auto satisfies = [&](const FinMap& m) {
                        return finClose(w, finCompose(m, c.injA), la) &&
                               finClose(w, finCompose(m, c.injB), lb);
                    };
                    auto cond = [&](std::size_t i, std::size_t q) {
                        return w.related(q, i < a.n ? la(i) : lb(i - a.n));
                    };
                    if (!verifyCanonicalAndOrbit(rep, c.object, w, canonical, satisfies,
                                                 cond, describeLegs({&la, &lb})))
                        return rep;
                }
            }
    return rep;
}

FinOracleReport finEqualizerUniversal(const FinMap& f, const FinMap& g, const FinSpace& y,
                                      const FinSpace& x, std::size_t maxApex) {
    requireOracleSizes({y.n, x.n}, maxApex);
    const FinEqualizerResult eq = finEqualizer(f, g, y, x);
    FinOracleReport rep;
    for (std::size_t k = 1; k <= maxApex; ++k)
        for (const FinSpace& w : allPartitions(k))
            for (const FinMap& t : allMaps(k, y.n)) {
                if (!finCoarse(t, w, y)) continue;
                if (!finClose(x, finCompose(f, t), finCompose(g, t))) continue;
                std::vector<std::size_t> mv(k);
                for (std::size_t z = 0; z < k; ++z) {
                    const auto it =
                        std::lower_bound(eq.carrier.begin(), eq.carrier.end(), t(z));
                    mv[z] = static_cast<std::size_t>(it - eq.carrier.begin());
                }
                const FinMap canonical = FinMap::of(k, eq.object.n, std::move(mv));
                auto satisfies = [&](const FinMap& m) {
                    return finClose(y, finCompose(eq.inclusion, m), t);
                };
                auto cond = [&](std::size_t z, std::size_t q) {
                    return y.related(eq.carrier[q], t(z));
                };
                if (!verifyCanonicalAndOrbit(rep, w, eq.object, canonical, satisfies,
                                             cond, describeLegs({&t})))
                    return rep;
            }
    return rep;
}

FinOracleReport finCoequalizerUniversal(const FinMap& f, const FinMap& g,
                                        const FinSpace& y, const FinSpace& x,
                                        std::size_t maxApex) {
    requireOracleSizes({y.n, x.n}, maxApex);
    const FinCoequalizerResult coeq = finCoequalizer(f, g, y, x);
    FinOracleReport rep;
    for (std::size_t k = 1; k <= maxApex; ++k)
        for (const FinSpace& w : allPartitions(k))
            for (const FinMap& u : allMaps(x.n, k)) {
                if (!finCoarse(u, x, w)) continue;
                if (!finClose(w, finCompose(u, f), finCompose(u, g))) continue;
                const FinMap canonical = FinMap::of(x.n, k, u.values);
                auto satisfies = [&](const FinMap& m) {
                    return finClose(w, finCompose(m, coeq.map), u);
                };
                auto cond = [&](std::size_t i, std::size_t q) {
                    return w.related(q, u(i));
                };
                if (!verifyCanonicalAndOrbit(rep, coeq.object, w, canonical, satisfies,
                                             cond, describeLegs({&u})))
                    return rep;
            }
    return rep;
}

FinOracleReport finPushoutUniversal(const FinMap& f, const FinMap& g, const FinSpace& z,
                                    const FinSpace& a, const FinSpace& b,
                                    std::size_t maxApex) {
    requireOracleSizes({z.n, a.n, b.n}, maxApex);
    const FinPushoutResult po = finPushout(f, g, z, a, b);
    FinOracleReport rep;
    for (std::size_t k = 1; k <= maxApex; ++k)
        for (const FinSpace& w : allPartitions(k))
            for (const FinMap& la : allMaps(a.n, k)) {
                if (!finCoarse(la, a, w)) continue;
                for (const FinMap& lb : allMaps(b.n, k)) {
                    if (!finCoarse(lb, b, w)) continue;
                    if (!finClose(w, finCompose(la, f), finCompose(lb, g))) continue;
                    std::vector<std::size_t> mv(po.object.n);
                    for (std::size_t i = 0; i < a.n; ++i) mv[po.fromA(i)] = la(i);
                    for (std::size_t j = 0; j < b.n; ++j) mv[po.fromB(j)] = lb(j);
                    const FinMap canonical = FinMap::of(po.object.n, k, std::move(mv));
                    auto satisfies = [&](const FinMap& m) {
                        return finClose(w, finCompose(m, po.fromA), la) &&
                               finClose(w, finCompose(m, po.fromB), lb);
                    };
                    auto cond = [&](std::size_t i, std::size_t q) {
                        // Pushout carrier indices: a's points then b's.
                        return w.related(q, i < a.n ? la(i) : lb(i - a.n));
                    };
                    if (!verifyCanonicalAndOrbit(rep, po.object, w, canonical, satisfies,
                                                 cond, describeLegs({&la, &lb})))
                        return rep;
                }
            }
    return rep;
}

// ---------------------------------------------------------------------------
// Cross-backend embedding
// ---------------------------------------------------------------------------

CoarseSpace finEmbed(const FinSpace& s, const std::string& prefix) {
    std::vector<Component> comps;
    for (std::size_t i = 0; i < s.n; ++i)
        comps.push_back({prefix + std::to_string(i), CompKind::Pt});
    Space sp = Space::make(std::move(comps));
    std::vector<MetricGeom::Cluster> clusters;
    for (const auto& block : s.partition) {
        MetricGeom::Cluster c;
        for (std::size_t x : block) c[prefix + std::to_string(x)] = 0;
        clusters.push_back(std::move(c));
    }
    return CoarseSpace::of(StructureDescr::metric(MetricGeom::glued(sp, std::move(clusters))));
}

EAMap finMapEmbed(const FinMap& f, const CoarseSpace& src, const CoarseSpace& dst) {
    const auto& srcComps = src.space.components();
    const auto& dstComps = dst.space.components();
    if (srcComps.size() != f.srcSize || dstComps.size() != f.dstSize)
        throw SpaceMismatch("embedded carriers do not fit the finite map");
    std::map<std::string, Point> ptImages;
    for (std::size_t x = 0; x < f.srcSize; ++x)
        ptImages.emplace(srcComps[x].id, Point{dstComps[f(x)].id, 0});
    return EAMap::make(src.space, dst.space, std::move(ptImages), {});
}

Relation finRelationEmbed(const FinRelation& e, const CoarseSpace& host) {
    const auto& comps = host.space.components();
    Relation r = Relation::empty(host.space);
    for (const auto& [u, v] : e) {
        if (u >= comps.size() || v >= comps.size())
            throw InvalidArgument("relation pair out of range for the embedded carrier");
        r = r.unite(Relation::singlePair(host.space, Point{comps[u].id, 0},
                                         Point{comps[v].id, 0}));
    }
    return r;
}

}  // namespace crs
