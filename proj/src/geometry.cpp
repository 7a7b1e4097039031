#include "bebp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace bebp {

PointSet::PointSet(std::vector<Vector> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  dim_ = points_.front().size();
  if (dim_ == 0) throw SchemaError("PointSet: zero-dimensional points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].size() != dim_) {
      throw SchemaError("PointSet: point " + std::to_string(i) + " has dimension " +
                        std::to_string(points_[i].size()) + ", expected " +
                        std::to_string(dim_));
    }
  }
}

std::vector<std::size_t> knn(const PointSet& points, std::size_t query_index,
                             std::size_t k) {
  if (query_index >= points.size()) {
    throw SizeError("knn: query index " + std::to_string(query_index) +
                    " out of range");
  }
  if (k == 0 || k >= points.size()) {
    throw SizeError("knn: need 0 < k < |points| (k=" + std::to_string(k) +
                    ", |points|=" + std::to_string(points.size()) + ")");
  }
  const ConstRow query = points[query_index];
  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(points.size() - 1);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == query_index) continue;
    candidates.emplace_back(squared_distance(query, points[j]), j);
  }
  auto nth = candidates.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(candidates.begin(), nth - 1, candidates.end());
  std::sort(candidates.begin(), nth);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (auto it = candidates.begin(); it != nth; ++it) out.push_back(it->second);
  return out;
}

MeanDirection mean_direction(ConstRow point, const std::vector<Vector>& neighbors) {
  Vector sum(point.size(), 0.0);
  std::size_t used = 0;
  for (const auto& neighbor : neighbors) {
    const double dist = std::sqrt(squared_distance(point, neighbor));
    if (dist == 0.0) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += (point[i] - neighbor[i]) / dist;
    }
    ++used;
  }
  if (used == 0) {
    throw DegenerateError("mean_direction: all neighbors coincide with the point");
  }
  // Averaged over all k neighbors, so skipped duplicates pull the magnitude
  // toward zero rather than inflating it.
  for (double& v : sum) v /= static_cast<double>(neighbors.size());
  MeanDirection out;
  out.magnitude = norm2(sum);
  if (out.magnitude > 0.0) {
    for (double& v : sum) v /= out.magnitude;
    out.unit_normal = std::move(sum);
  }
  return out;
}

std::vector<EdgePattern> edge_detect(const PointSet& points,
                                     const EdgeDetectOptions& options) {
  if (options.k == 0 || points.size() <= options.k) {
    throw SizeError("edge_detect: need |points| > k (k=" + std::to_string(options.k) +
                    ", |points|=" + std::to_string(points.size()) + ")");
  }
  if (!(options.tau > 0.0 && options.tau <= 1.0)) {
    throw SizeError("edge_detect: tau must lie in (0, 1]");
  }
  std::vector<EdgePattern> edges;
  std::vector<Vector> neighbors(options.k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto idx = knn(points, i, options.k);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      neighbors[j].assign(points[idx[j]].begin(), points[idx[j]].end());
    }
    MeanDirection dir;
    try {
      dir = mean_direction(points[i], neighbors);
    } catch (const DegenerateError&) {
      continue;
    }
    if (!dir.unit_normal || dir.magnitude < options.tau) continue;
    edges.push_back(EdgePattern{Vector(points[i].begin(), points[i].end()),
                                std::move(*dir.unit_normal), i});
  }
  return edges;
}

}  // namespace bebp
