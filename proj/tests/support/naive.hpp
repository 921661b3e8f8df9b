#pragma once

// Independent reference semantics ("oracles") used by the unit and
// acceptance tests. Everything here evaluates membership directly from
// defining data over finite windows, without calling the algebraic
// operations under test.

#include <crs/upset.hpp>

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace crs::testing {

using Pred = std::function<bool(std::uint64_t)>;

// Defining semantics of an ultimately periodic description, written out
// from the four parts. This is the ground truth the UPSet class must match.
inline bool semMember(const std::vector<std::uint64_t>& prefix, std::uint64_t t,
                      std::uint64_t p, const std::vector<std::uint64_t>& res,
                      std::uint64_t i) {
  for (std::uint64_t x : prefix)
    if (x == i) return true;
  if (i < t) return false;
  const std::uint64_t r = i % p;
  for (std::uint64_t x : res)
    if (x == r) return true;
  return false;
}

inline Pred semOf(const UPSet& s) {
  return [prefix = s.prefix(), t = s.threshold(), p = s.period(),
          res = s.residues()](std::uint64_t i) {
    return semMember(prefix, t, p, res, i);
  };
}

// Window beyond which two ultimately periodic sets cannot start to
// disagree if they agreed everywhere below it: unroll both transients and
// two full joint periods.
inline std::uint64_t unrollWindow(const UPSet& a, const UPSet& b) {
  return a.threshold() + b.threshold() + 2 * lcmU64(a.period(), b.period());
}

inline bool agreesUpTo(const UPSet& got, const Pred& want, std::uint64_t W,
                       std::uint64_t* firstBad = nullptr) {
  for (std::uint64_t i = 0; i <= W; ++i) {
    if (got.contains(i) != want(i)) {
      if (firstBad) *firstBad = i;
      return false;
    }
  }
  return true;
}

// Naive sup_{s in S, s <= sBound} d(s, T) with T sampled up to tBound.
// Returns nullopt when some inspected s has no T member at all.
inline std::optional<std::uint64_t> naiveSupDistance(const Pred& S, const Pred& T,
                                                     std::uint64_t sBound,
                                                     std::uint64_t tBound) {
  std::vector<std::uint64_t> ts;
  for (std::uint64_t j = 0; j <= tBound; ++j)
    if (T(j)) ts.push_back(j);
  std::uint64_t best = 0;
  for (std::uint64_t i = 0; i <= sBound; ++i) {
    if (!S(i)) continue;
    std::uint64_t d = UINT64_MAX;
    for (std::uint64_t j : ts) {
      const std::uint64_t cur = i > j ? i - j : j - i;
      if (cur < d) d = cur;
    }
    if (d == UINT64_MAX) return std::nullopt;
    if (d > best) best = d;
  }
  return best;
}

inline UPSet randomUPSet(std::mt19937_64& rng, std::uint64_t maxT = 8,
                         std::uint64_t maxP = 6) {
  std::uniform_int_distribution<std::uint64_t> tDist(0, maxT);
  std::uniform_int_distribution<std::uint64_t> pDist(1, maxP);
  const std::uint64_t t = tDist(rng);
  const std::uint64_t p = pDist(rng);
  std::uniform_int_distribution<int> coin(0, 2);
  std::vector<std::uint64_t> prefix, res;
  for (std::uint64_t i = 0; i < t; ++i)
    if (coin(rng) == 0) prefix.push_back(i);
  for (std::uint64_t r = 0; r < p; ++r)
    if (coin(rng) == 0) res.push_back(r);
  return UPSet::fromParts(std::move(prefix), t, p, std::move(res));
}

// Like randomUPSet but guaranteed infinite.
inline UPSet randomInfiniteUPSet(std::mt19937_64& rng, std::uint64_t maxT = 8,
                                 std::uint64_t maxP = 6) {
  for (;;) {
    UPSet s = randomUPSet(rng, maxT, maxP);
    if (!s.isFinite()) return s;
  }
}

}  // namespace crs::testing
