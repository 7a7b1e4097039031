#ifndef BEBP_GEOMETRY_HPP
#define BEBP_GEOMETRY_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "bebp/types.hpp"

namespace bebp {

// Dense point cloud. All rows share one dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<Vector> points);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return points_.empty(); }
  ConstRow operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Vector>& points() const { return points_; }

 private:
  std::vector<Vector> points_;
  std::size_t dim_ = 0;
};

struct EdgePattern {
  Vector point;
  Vector normal;  // unit length, points away from the data mass
  std::size_t source_index = 0;
};

struct MeanDirection {
  double magnitude = 0.0;
  // Empty when the directions cancel exactly (magnitude 0).
  std::optional<Vector> unit_normal;
};

struct EdgeDetectOptions {
  std::size_t k = 10;
  double tau = 0.5;
};

// Indices of the k nearest points to points[query_index], excluding the query
// itself, ascending by Euclidean distance; ties go to the lower index.
std::vector<std::size_t> knn(const PointSet& points, std::size_t query_index,
                             std::size_t k);

// Mean of the unit vectors pointing from each neighbor to `point`.
// Neighbors coincident with the point contribute nothing; throws
// DegenerateError when every neighbor is coincident.
MeanDirection mean_direction(ConstRow point, const std::vector<Vector>& neighbors);

// Edge pattern detection: x is an edge point iff the mean unit direction from
// its k neighbors has norm >= tau.
std::vector<EdgePattern> edge_detect(const PointSet& points,
                                     const EdgeDetectOptions& options);

}  // namespace bebp

#endif  // BEBP_GEOMETRY_HPP
