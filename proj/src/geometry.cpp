#include "crs/geometry.hpp"

#include <sstream>

#include "crs/errors.hpp"

namespace crs {

MetricGeom MetricGeom::discrete(const Space& sp) {
  std::vector<Cluster> cs;
  for (const Component& c : sp.components()) cs.push_back({{c.id, 0}});
  return glued(sp, std::move(cs));
}

MetricGeom MetricGeom::glued(const Space& sp, std::vector<Cluster> clusters) {
  MetricGeom g;
  g.space_ = sp;
  g.clusters_ = std::move(clusters);
  for (std::size_t i = 0; i < g.clusters_.size(); ++i)
    for (const auto& [id, off] : g.clusters_[i]) {
      if (!sp.has(id)) throw InvalidArgument("geometry: unknown component '" + id + "'");
      if (!g.clusterIndex_.emplace(id, i).second)
        throw InvalidArgument("geometry: component '" + id + "' glued twice");
    }
  for (const Component& c : sp.components())
    if (!g.clusterIndex_.count(c.id))
      throw InvalidArgument("geometry: component '" + c.id + "' not placed");
  return g;
}

std::size_t MetricGeom::clusterOf(const std::string& compId) const {
  const auto it = clusterIndex_.find(compId);
  if (it == clusterIndex_.end())
    throw ResolveError("geometry: unknown component '" + compId + "'");
  return it->second;
}

bool MetricGeom::sameCluster(const std::string& c1, const std::string& c2) const {
  return clusterOf(c1) == clusterOf(c2);
}

std::uint64_t MetricGeom::offsetOf(const std::string& compId) const {
  return clusters_[clusterOf(compId)].at(compId);
}

std::optional<std::uint64_t> MetricGeom::distance(const Point& x, const Point& y) const {
  if (x.comp == y.comp) {
    (void)clusterOf(x.comp);
    return x.index > y.index ? x.index - y.index : y.index - x.index;
  }
  if (!sameCluster(x.comp, y.comp)) return std::nullopt;
  return (x.index + offsetOf(x.comp)) + (y.index + offsetOf(y.comp));
}

std::string MetricGeom::toString() const {
  std::ostringstream os;
  os << "geom{";
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    os << (i ? " | " : "");
    bool first = true;
    for (const auto& [id, off] : clusters_[i]) {
      os << (first ? "" : ",") << id << "+" << off;
      first = false;
    }
  }
  os << "}";
  return os.str();
}

}  // namespace crs
