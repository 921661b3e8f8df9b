#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crs/ground.hpp"

namespace crs {

// Path geometry on a ground space: components are grouped into clusters and
// glued at their basepoints, with a per-component offset (the distance from
// the component's basepoint to the cluster hub). Distances:
//   same ray:                |i - j|
//   same cluster, different: (i + off(c)) + (j + off(c'))
//   different clusters:      infinite (nullopt)
// Point components sit at index 0.
class MetricGeom {
 public:
  using Cluster = std::map<std::string, std::uint64_t>;  // comp id -> offset

  // Every component in its own cluster with offset 0.
  static MetricGeom discrete(const Space& sp);
  // Explicit clusters; must partition the components of the space.
  static MetricGeom glued(const Space& sp, std::vector<Cluster> clusters);

  const Space& space() const { return space_; }
  const std::vector<Cluster>& clusters() const { return clusters_; }

  std::size_t clusterOf(const std::string& compId) const;
  bool sameCluster(const std::string& c1, const std::string& c2) const;
  std::uint64_t offsetOf(const std::string& compId) const;

  std::optional<std::uint64_t> distance(const Point& x, const Point& y) const;

  bool operator==(const MetricGeom&) const = default;
  std::string toString() const;

 private:
  Space space_;
  std::vector<Cluster> clusters_;
  std::map<std::string, std::size_t> clusterIndex_;
};

}  // namespace crs
