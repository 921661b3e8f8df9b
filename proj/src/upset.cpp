#include "crs/upset.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "crs/errors.hpp"

namespace crs {

namespace {

void sortUnique(std::vector<std::uint64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool member(const std::vector<std::uint64_t>& sorted, std::uint64_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

std::uint64_t posMod(std::int64_t v, std::uint64_t m) {
  const std::int64_t mm = static_cast<std::int64_t>(m);
  std::int64_t r = v % mm;
  if (r < 0) r += mm;
  return static_cast<std::uint64_t>(r);
}

}  // namespace

std::uint64_t lcmU64(std::uint64_t a, std::uint64_t b) {
  return std::lcm(a, b);
}

void UPSet::canonicalize() {
  if (period_ == 0) throw InvalidArgument("ultimately periodic set: period must be >= 1");
  for (auto& r : residues_) r %= period_;
  sortUnique(prefix_);
  sortUnique(residues_);

  // Fold prefix elements at or above the threshold into an unrolled prefix.
  if (!prefix_.empty() && prefix_.back() >= threshold_) {
    const std::uint64_t top = prefix_.back() + 1;
    std::vector<std::uint64_t> unrolled;
    for (std::uint64_t x : prefix_)
      if (x < threshold_) unrolled.push_back(x);
    for (std::uint64_t i = threshold_; i < top; ++i)
      if (member(residues_, i % period_) || member(prefix_, i)) unrolled.push_back(i);
    prefix_ = std::move(unrolled);
    threshold_ = top;
    sortUnique(prefix_);
  }

  // Minimal period: the smallest divisor under which the residue set is
  // shift-invariant.
  for (std::uint64_t q = 1; q < period_; ++q) {
    if (period_ % q != 0) continue;
    bool invariant = true;
    for (std::uint64_t r : residues_)
      if (!member(residues_, (r + q) % period_)) {
        invariant = false;
        break;
      }
    if (invariant) {
      std::vector<std::uint64_t> cut;
      for (std::uint64_t r : residues_)
        if (r < q) cut.push_back(r);
      residues_ = std::move(cut);
      period_ = q;
      break;
    }
  }

  // Minimal threshold: pull the boundary down while the prefix and the
  // periodic tail agree just below it.
  while (threshold_ > 0) {
    const std::uint64_t i = threshold_ - 1;
    const bool inPrefix = !prefix_.empty() && prefix_.back() == i;
    const bool inTail = member(residues_, i % period_);
    if (inPrefix != inTail) break;
    if (inPrefix) prefix_.pop_back();
    --threshold_;
  }
}

UPSet UPSet::empty() { return UPSet(); }

UPSet UPSet::all() { return periodic(1, {0}); }

UPSet UPSet::single(std::uint64_t i) { return fromParts({i}, 0, 1, {}); }

UPSet UPSet::finiteSet(std::vector<std::uint64_t> elems) {
  return fromParts(std::move(elems), 0, 1, {});
}

UPSet UPSet::fromIndex(std::uint64_t from) { return fromParts({}, from, 1, {0}); }

UPSet UPSet::periodic(std::uint64_t period, std::vector<std::uint64_t> residues) {
  return fromParts({}, 0, period, std::move(residues));
}

UPSet UPSet::fromParts(std::vector<std::uint64_t> prefix, std::uint64_t threshold,
                       std::uint64_t period, std::vector<std::uint64_t> residues) {
  UPSet s;
  s.prefix_ = std::move(prefix);
  s.threshold_ = threshold;
  s.period_ = period;
  s.residues_ = std::move(residues);
  s.canonicalize();
  return s;
}

UPSet UPSet::evens() { return periodic(2, {0}); }
UPSet UPSet::odds() { return periodic(2, {1}); }

UPSet UPSet::multiplesOf(std::uint64_t m) {
  if (m == 0) throw InvalidArgument("multiplesOf: modulus must be >= 1");
  return periodic(m, {0});
}

UPSet UPSet::range(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) return empty();
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = lo; i <= hi; ++i) v.push_back(i);
  return finiteSet(std::move(v));
}

bool UPSet::contains(std::uint64_t i) const {
  if (member(prefix_, i)) return true;
  return i >= threshold_ && member(residues_, i % period_);
}

bool UPSet::isEmpty() const { return prefix_.empty() && residues_.empty(); }

bool UPSet::isFinite() const { return residues_.empty(); }

std::vector<std::uint64_t> UPSet::enumerate(std::uint64_t bound) const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t x : prefix_) {
    if (x > bound) break;
    out.push_back(x);
  }
  if (!residues_.empty()) {
    for (std::uint64_t i = threshold_; i <= bound; ++i) {
      if (member(residues_, i % period_)) out.push_back(i);
      if (i == UINT64_MAX) break;
    }
  }
  return out;
}

std::uint64_t UPSet::countUpTo(std::uint64_t bound) const {
  std::uint64_t n = 0;
  for (std::uint64_t x : prefix_)
    if (x <= bound) ++n;
  if (!residues_.empty() && bound >= threshold_) {
    // Count members of full periods, then the remainder.
    const std::uint64_t span = bound - threshold_ + 1;
    const std::uint64_t full = span / period_;
    n += full * residues_.size();
    for (std::uint64_t i = threshold_ + full * period_; i <= bound; ++i)
      if (member(residues_, i % period_)) ++n;
  }
  return n;
}

std::optional<std::uint64_t> UPSet::minElement() const {
  std::optional<std::uint64_t> best;
  if (!prefix_.empty()) best = prefix_.front();
  if (!residues_.empty()) {
    for (std::uint64_t i = threshold_; i < threshold_ + period_; ++i)
      if (member(residues_, i % period_)) {
        if (!best || i < *best) best = i;
        break;
      }
  }
  return best;
}

std::optional<std::uint64_t> UPSet::maxElement() const {
  if (!residues_.empty() || prefix_.empty()) return std::nullopt;
  return prefix_.back();
}

std::optional<std::uint64_t> UPSet::nextMember(std::uint64_t from) const {
  std::optional<std::uint64_t> best;
  auto it = std::lower_bound(prefix_.begin(), prefix_.end(), from);
  if (it != prefix_.end()) best = *it;
  if (!residues_.empty()) {
    const std::uint64_t start = std::max(from, threshold_);
    for (std::uint64_t i = start; i < start + period_; ++i)
      if (member(residues_, i % period_)) {
        if (!best || i < *best) best = i;
        break;
      }
  }
  return best;
}

std::optional<std::uint64_t> UPSet::prevMember(std::uint64_t from) const {
  std::optional<std::uint64_t> best;
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), from);
  if (it != prefix_.begin()) best = *(it - 1);
  if (!residues_.empty() && from >= threshold_) {
    std::uint64_t i = from;
    for (std::uint64_t steps = 0; steps <= period_; ++steps) {
      if (member(residues_, i % period_)) {
        if (!best || i > *best) best = i;
        break;
      }
      if (i == threshold_) break;
      --i;
    }
  }
  return best;
}

namespace {

UPSet combine(const UPSet& a, const UPSet& b, bool (*f)(bool, bool)) {
  const std::uint64_t P = lcmU64(a.period(), b.period());
  const std::uint64_t T = std::max(a.threshold(), b.threshold());
  std::vector<std::uint64_t> prefix, residues;
  for (std::uint64_t i = 0; i < T; ++i)
    if (f(a.contains(i), b.contains(i))) prefix.push_back(i);
  const auto& ra = a.residues();
  const auto& rb = b.residues();
  for (std::uint64_t r = 0; r < P; ++r) {
    const bool ina = std::binary_search(ra.begin(), ra.end(), r % a.period());
    const bool inb = std::binary_search(rb.begin(), rb.end(), r % b.period());
    if (f(ina, inb)) residues.push_back(r);
  }
  return UPSet::fromParts(std::move(prefix), T, P, std::move(residues));
}

}  // namespace

UPSet UPSet::unite(const UPSet& o) const {
  return combine(*this, o, [](bool x, bool y) { return x || y; });
}

UPSet UPSet::intersect(const UPSet& o) const {
  return combine(*this, o, [](bool x, bool y) { return x && y; });
}

UPSet UPSet::difference(const UPSet& o) const {
  return combine(*this, o, [](bool x, bool y) { return x && !y; });
}

UPSet UPSet::complement() const {
  std::vector<std::uint64_t> prefix, residues;
  for (std::uint64_t i = 0; i < threshold_; ++i)
    if (!contains(i)) prefix.push_back(i);
  for (std::uint64_t r = 0; r < period_; ++r)
    if (!member(residues_, r)) residues.push_back(r);
  return fromParts(std::move(prefix), threshold_, period_, std::move(residues));
}

UPSet UPSet::shift(std::int64_t k) const {
  if (k >= 0) {
    const std::uint64_t m = static_cast<std::uint64_t>(k);
    std::vector<std::uint64_t> prefix, residues;
    for (std::uint64_t x : prefix_) prefix.push_back(x + m);
    for (std::uint64_t r : residues_) residues.push_back((r + m) % period_);
    return fromParts(std::move(prefix), threshold_ + m, period_, std::move(residues));
  }
  const std::uint64_t m = static_cast<std::uint64_t>(-k);
  std::vector<std::uint64_t> prefix, residues;
  for (std::uint64_t x : prefix_)
    if (x >= m) prefix.push_back(x - m);
  for (std::uint64_t r : residues_)
    residues.push_back(posMod(static_cast<std::int64_t>(r) - static_cast<std::int64_t>(m),
                              period_));
  const std::uint64_t t = threshold_ > m ? threshold_ - m : 0;
  return fromParts(std::move(prefix), t, period_, std::move(residues));
}

UPSet UPSet::affineImage(std::uint64_t a, std::int64_t b) const {
  if (a == 0) throw InvalidArgument("affineImage: slope must be >= 1");
  std::vector<std::uint64_t> prefix, residues;
  for (std::uint64_t x : prefix_) {
    const std::int64_t v = static_cast<std::int64_t>(a * x) + b;
    if (v >= 0) prefix.push_back(static_cast<std::uint64_t>(v));
  }
  const std::uint64_t P = a * period_;
  for (std::uint64_t r : residues_)
    residues.push_back(posMod(static_cast<std::int64_t>(a * r) + b, P));
  const std::int64_t tRaw = static_cast<std::int64_t>(a * threshold_) + b;
  const std::uint64_t T = tRaw > 0 ? static_cast<std::uint64_t>(tRaw) : 0;
  return fromParts(std::move(prefix), T, P, std::move(residues));
}

UPSet UPSet::affinePreimage(std::uint64_t a, std::int64_t b) const {
  if (a == 0) {
    return (b >= 0 && contains(static_cast<std::uint64_t>(b))) ? all() : empty();
  }
  const std::int64_t num = static_cast<std::int64_t>(threshold_) - b;
  const std::uint64_t T =
      num <= 0 ? 0
               : static_cast<std::uint64_t>((num + static_cast<std::int64_t>(a) - 1) /
                                            static_cast<std::int64_t>(a));
  std::vector<std::uint64_t> prefix, residues;
  for (std::uint64_t i = 0; i < T; ++i) {
    const std::int64_t v = static_cast<std::int64_t>(a * i) + b;
    if (v >= 0 && contains(static_cast<std::uint64_t>(v))) prefix.push_back(i);
  }
  for (std::uint64_t rho = 0; rho < period_; ++rho) {
    const std::uint64_t v = posMod(static_cast<std::int64_t>(a * rho) + b, period_);
    if (member(residues_, v)) residues.push_back(rho);
  }
  return fromParts(std::move(prefix), T, period_, std::move(residues));
}

std::optional<std::uint64_t> UPSet::subsetWitness(const UPSet& o) const {
  return difference(o).minElement();
}

bool UPSet::subsetOf(const UPSet& o) const { return difference(o).isEmpty(); }

std::string UPSet::toString() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (std::uint64_t x : prefix_) {
    if (!first) os << ",";
    os << x;
    first = false;
  }
  if (!residues_.empty()) {
    if (!first) os << " ";
    os << "| i>=" << threshold_ << ", i mod " << period_ << " in {";
    first = true;
    for (std::uint64_t r : residues_) {
      if (!first) os << ",";
      os << r;
      first = false;
    }
    os << "}";
  }
  os << "}";
  return os.str();
}

namespace {

// Distance from one index to the nearest member of T (T nonempty).
std::uint64_t distTo(std::uint64_t s, const UPSet& T) {
  std::uint64_t d = UINT64_MAX;
  if (auto up = T.nextMember(s)) d = std::min(d, *up - s);
  if (auto dn = T.prevMember(s)) d = std::min(d, s - *dn);
  return d;
}

}  // namespace

std::optional<std::uint64_t> supDistance(const UPSet& S, const UPSet& T) {
  if (S.isEmpty()) return 0;
  if (T.isEmpty()) return std::nullopt;
  if (!S.isFinite() && T.isFinite()) return std::nullopt;
  const std::uint64_t L = lcmU64(S.period(), T.period());
  // Every tail distance pattern repeats with period L once both transients
  // are passed; one full window of classes beyond that point is exact.
  const std::uint64_t W = S.threshold() + T.threshold() + 4 * L;
  std::uint64_t best = 0;
  for (std::uint64_t s : S.enumerate(W)) best = std::max(best, distTo(s, T));
  return best;
}

std::optional<TailDistance> tailDistance(const UPSet& S, const UPSet& T) {
  if (S.isFinite()) {
    TailDistance td;
    td.bound = 0;
    if (auto mx = S.maxElement()) {
      for (std::uint64_t s : S.enumerate(*mx))
        if (T.isEmpty() || distTo(s, T) > 0) td.exceptions.push_back(s);
    }
    return td;
  }
  if (T.isFinite()) return std::nullopt;
  const std::uint64_t L = lcmU64(S.period(), T.period());
  const std::uint64_t W1 = S.threshold() + T.threshold() + 2 * L;
  // The tail supremum is attained within one joint period past both
  // transients.
  std::uint64_t bound = 0;
  for (std::uint64_t s = W1; s < W1 + L; ++s)
    if (S.contains(s)) bound = std::max(bound, distTo(s, T));
  TailDistance td;
  td.bound = bound;
  for (std::uint64_t s : S.enumerate(W1 == 0 ? 0 : W1 - 1))
    if (distTo(s, T) > bound) td.exceptions.push_back(s);
  return td;
}

}  // namespace crs
