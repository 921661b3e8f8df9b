#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crs {

// An ultimately periodic subset of the natural numbers:
//
//   S = prefix  ∪  { i >= threshold : i mod period ∈ residues }
//
// kept in a canonical form so that structural equality coincides with
// semantic (membership) equality:
//   * every prefix element is < threshold,
//   * period is the minimal one (residue word is primitive),
//   * threshold is minimal for the given tail,
//   * an eventually-empty set has period 1 and no residues.
class UPSet {
 public:
  // The empty set.
  UPSet() = default;

  static UPSet empty();
  static UPSet all();
  static UPSet single(std::uint64_t i);
  static UPSet finiteSet(std::vector<std::uint64_t> elems);
  // { i >= from }
  static UPSet fromIndex(std::uint64_t from);
  // { i : i mod period ∈ residues }  (threshold 0)
  static UPSet periodic(std::uint64_t period, std::vector<std::uint64_t> residues);
  // General constructor; input need not be canonical.
  static UPSet fromParts(std::vector<std::uint64_t> prefix, std::uint64_t threshold,
                         std::uint64_t period, std::vector<std::uint64_t> residues);
  static UPSet evens();
  static UPSet odds();
  static UPSet multiplesOf(std::uint64_t m);
  // { lo, ..., hi }  (empty if hi < lo)
  static UPSet range(std::uint64_t lo, std::uint64_t hi);

  bool contains(std::uint64_t i) const;
  bool isEmpty() const;
  bool isFinite() const;
  // All members <= bound, ascending.
  std::vector<std::uint64_t> enumerate(std::uint64_t bound) const;
  // Number of members <= bound.
  std::uint64_t countUpTo(std::uint64_t bound) const;
  std::optional<std::uint64_t> minElement() const;
  // Largest member; only for finite nonempty sets.
  std::optional<std::uint64_t> maxElement() const;
  // Smallest member >= from.
  std::optional<std::uint64_t> nextMember(std::uint64_t from) const;
  // Largest member <= from.
  std::optional<std::uint64_t> prevMember(std::uint64_t from) const;

  UPSet unite(const UPSet& o) const;
  UPSet intersect(const UPSet& o) const;
  UPSet difference(const UPSet& o) const;
  UPSet complement() const;
  // { i + k : i ∈ S, i + k >= 0 }
  UPSet shift(std::int64_t k) const;
  // { a*i + b : i ∈ S, a*i + b >= 0 },  a >= 1
  UPSet affineImage(std::uint64_t a, std::int64_t b) const;
  // { i : a*i + b ∈ S, a*i + b >= 0 };  a = 0 means the constant map i ↦ b.
  UPSet affinePreimage(std::uint64_t a, std::int64_t b) const;

  bool subsetOf(const UPSet& o) const;
  // Smallest member of this \ o, if any.
  std::optional<std::uint64_t> subsetWitness(const UPSet& o) const;

  bool operator==(const UPSet& o) const = default;
  std::strong_ordering operator<=>(const UPSet& o) const = default;

  const std::vector<std::uint64_t>& prefix() const { return prefix_; }
  std::uint64_t threshold() const { return threshold_; }
  std::uint64_t period() const { return period_; }
  const std::vector<std::uint64_t>& residues() const { return residues_; }

  std::string toString() const;

 private:
  std::vector<std::uint64_t> prefix_;
  std::uint64_t threshold_ = 0;
  std::uint64_t period_ = 1;
  std::vector<std::uint64_t> residues_;

  void canonicalize();
};

std::uint64_t lcmU64(std::uint64_t a, std::uint64_t b);

// sup_{s ∈ S} d(s, T) for subsets of one ray with d(i,j) = |i - j|.
// nullopt means the supremum is infinite (T empty with S nonempty, or
// S infinite while T is finite). S empty gives 0.
std::optional<std::uint64_t> supDistance(const UPSet& S, const UPSet& T);

// Least R such that all but finitely many s ∈ S satisfy d(s, T) <= R,
// together with the exceptional members for that R. nullopt when no such
// R exists (S infinite while T is finite or empty).
struct TailDistance {
  std::uint64_t bound = 0;
  std::vector<std::uint64_t> exceptions;
};
std::optional<TailDistance> tailDistance(const UPSet& S, const UPSet& T);

}  // namespace crs
