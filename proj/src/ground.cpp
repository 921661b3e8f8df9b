#include "crs/ground.hpp"

#include <algorithm>
#include <sstream>

#include "crs/errors.hpp"

namespace crs {

Space Space::make(std::vector<Component> comps) {
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (std::size_t j = i + 1; j < comps.size(); ++j)
      if (comps[i].id == comps[j].id)
        throw InvalidArgument("space: duplicate component id '" + comps[i].id + "'");
  Space sp;
  sp.comps_ = std::move(comps);
  return sp;
}

Space Space::ray(const std::string& id) { return make({{id, CompKind::Ray}}); }

Space Space::point(const std::string& id) { return make({{id, CompKind::Pt}}); }

Space Space::rays(std::size_t n) {
  std::vector<Component> cs;
  for (std::size_t i = 0; i < n; ++i) cs.push_back({"r" + std::to_string(i), CompKind::Ray});
  return make(std::move(cs));
}

Space Space::points(std::size_t n) {
  std::vector<Component> cs;
  for (std::size_t i = 0; i < n; ++i) cs.push_back({"p" + std::to_string(i), CompKind::Pt});
  return make(std::move(cs));
}

bool Space::has(const std::string& id) const {
  for (const auto& c : comps_)
    if (c.id == id) return true;
  return false;
}

CompKind Space::kindOf(const std::string& id) const {
  for (const auto& c : comps_)
    if (c.id == id) return c.kind;
  throw ResolveError("space: no component named '" + id + "'");
}

bool Space::hasRays() const {
  for (const auto& c : comps_)
    if (c.kind == CompKind::Ray) return true;
  return false;
}

std::string Space::toString() const {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (const auto& c : comps_) {
    if (!first) os << ", ";
    os << c.id << (c.kind == CompKind::Ray ? ":ray" : ":pt");
    first = false;
  }
  os << "]";
  return os.str();
}

std::string Point::toString() const {
  return "(" + comp + "," + std::to_string(index) + ")";
}

PointSet PointSet::full(const Space& sp) {
  PointSet s(sp);
  for (const auto& c : sp.components()) {
    if (c.kind == CompKind::Ray)
      s.rays_[c.id] = UPSet::all();
    else
      s.pts_.insert(c.id);
  }
  return s;
}

PointSet PointSet::ofRay(const Space& sp, const std::string& rayId, const UPSet& s) {
  if (sp.kindOf(rayId) != CompKind::Ray)
    throw InvalidArgument("point set: component '" + rayId + "' is not a ray");
  PointSet out(sp);
  if (!s.isEmpty()) out.rays_[rayId] = s;
  return out;
}

PointSet PointSet::ofPoints(const Space& sp, const std::vector<Point>& pts) {
  PointSet out(sp);
  for (const auto& p : pts) out = out.withPoint(p);
  return out;
}

bool PointSet::contains(const Point& x) const {
  if (!space_.has(x.comp)) return false;
  if (space_.kindOf(x.comp) == CompKind::Pt)
    return x.index == 0 && pts_.count(x.comp) > 0;
  auto it = rays_.find(x.comp);
  return it != rays_.end() && it->second.contains(x.index);
}

bool PointSet::isEmpty() const { return rays_.empty() && pts_.empty(); }

bool PointSet::isFinite() const {
  for (const auto& [id, s] : rays_)
    if (!s.isFinite()) return false;
  return true;
}

std::uint64_t PointSet::finiteSize() const {
  std::uint64_t n = pts_.size();
  for (const auto& [id, s] : rays_) {
    if (!s.isFinite()) throw InvalidArgument("finiteSize: set is infinite");
    n += s.enumerate(s.maxElement().value_or(0)).size();
  }
  return n;
}

void PointSet::requireSameSpace(const PointSet& o) const {
  if (!(space_ == o.space_))
    throw SpaceMismatch("point sets live over different spaces: " + space_.toString() +
                        " vs " + o.space_.toString());
}

PointSet PointSet::unite(const PointSet& o) const {
  requireSameSpace(o);
  PointSet out(space_);
  for (const auto& c : space_.components()) {
    if (c.kind == CompKind::Ray) {
      UPSet s = ray(c.id).unite(o.ray(c.id));
      if (!s.isEmpty()) out.rays_[c.id] = s;
    } else if (pts_.count(c.id) || o.pts_.count(c.id)) {
      out.pts_.insert(c.id);
    }
  }
  return out;
}

PointSet PointSet::intersect(const PointSet& o) const {
  requireSameSpace(o);
  PointSet out(space_);
  for (const auto& c : space_.components()) {
    if (c.kind == CompKind::Ray) {
      UPSet s = ray(c.id).intersect(o.ray(c.id));
      if (!s.isEmpty()) out.rays_[c.id] = s;
    } else if (pts_.count(c.id) && o.pts_.count(c.id)) {
      out.pts_.insert(c.id);
    }
  }
  return out;
}

PointSet PointSet::difference(const PointSet& o) const {
  requireSameSpace(o);
  PointSet out(space_);
  for (const auto& c : space_.components()) {
    if (c.kind == CompKind::Ray) {
      UPSet s = ray(c.id).difference(o.ray(c.id));
      if (!s.isEmpty()) out.rays_[c.id] = s;
    } else if (pts_.count(c.id) && !o.pts_.count(c.id)) {
      out.pts_.insert(c.id);
    }
  }
  return out;
}

PointSet PointSet::complement() const { return full(space_).difference(*this); }

bool PointSet::subsetOf(const PointSet& o) const { return !subsetWitness(o).has_value(); }

std::optional<Point> PointSet::subsetWitness(const PointSet& o) const {
  requireSameSpace(o);
  for (const auto& c : space_.components()) {
    if (c.kind == CompKind::Ray) {
      if (auto w = ray(c.id).subsetWitness(o.ray(c.id))) return Point{c.id, *w};
    } else if (pts_.count(c.id) && !o.pts_.count(c.id)) {
      return Point{c.id, 0};
    }
  }
  return std::nullopt;
}

std::optional<Point> PointSet::anyElement() const {
  for (const auto& c : space_.components()) {
    if (c.kind == CompKind::Ray) {
      auto it = rays_.find(c.id);
      if (it != rays_.end())
        if (auto m = it->second.minElement()) return Point{c.id, *m};
    } else if (pts_.count(c.id)) {
      return Point{c.id, 0};
    }
  }
  return std::nullopt;
}

std::vector<Point> PointSet::enumerate(std::uint64_t perRayBound) const {
  std::vector<Point> out;
  for (const auto& c : space_.components()) {
    if (c.kind == CompKind::Ray) {
      for (std::uint64_t i : ray(c.id).enumerate(perRayBound)) out.push_back({c.id, i});
    } else if (pts_.count(c.id)) {
      out.push_back({c.id, 0});
    }
  }
  return out;
}

UPSet PointSet::ray(const std::string& id) const {
  auto it = rays_.find(id);
  return it == rays_.end() ? UPSet::empty() : it->second;
}

bool PointSet::ptMember(const std::string& id) const { return pts_.count(id) > 0; }

PointSet PointSet::withRay(const std::string& rayId, const UPSet& s) const {
  if (space_.kindOf(rayId) != CompKind::Ray)
    throw InvalidArgument("point set: component '" + rayId + "' is not a ray");
  PointSet out = *this;
  if (s.isEmpty())
    out.rays_.erase(rayId);
  else
    out.rays_[rayId] = s;
  return out;
}

PointSet PointSet::withPoint(const Point& x) const {
  PointSet out = *this;
  if (space_.kindOf(x.comp) == CompKind::Pt) {
    if (x.index != 0)
      throw InvalidArgument("point set: point component index must be 0");
    out.pts_.insert(x.comp);
  } else {
    out.rays_[x.comp] = ray(x.comp).unite(UPSet::single(x.index));
  }
  return out;
}

std::string PointSet::toString() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [id, s] : rays_) {
    if (!first) os << ", ";
    os << id << ":" << s.toString();
    first = false;
  }
  for (const auto& id : pts_) {
    if (!first) os << ", ";
    os << id;
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace crs
