#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bebp/geometry.hpp"
#include "bebp/random.hpp"
#include "oracles.hpp"

using namespace bebp;

namespace {

std::vector<Vector> random_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> pts(n, Vector(d));
  for (auto& p : pts)
    for (auto& v : p) v = rng.uniform();
  return pts;
}

std::vector<Vector> disk(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> pts;
  while (pts.size() < n) {
    const double x = 2.0 * rng.uniform() - 1.0, y = 2.0 * rng.uniform() - 1.0;
    if (x * x + y * y <= 1.0) pts.push_back({x, y});
  }
  return pts;
}

PointSet square_with_center() {
  return PointSet({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}});
}

}  // namespace

TEST_CASE("knn small examples") {
  PointSet pts({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
  auto nn = knn(pts, 0, 2);
  CHECK(std::set<std::size_t>(nn.begin(), nn.end()) == std::set<std::size_t>{1, 2});
  CHECK(knn(PointSet({{0, 0}, {1, 0}}), 0, 1) == std::vector<std::size_t>{1});
}

TEST_CASE("knn errors") {
  PointSet pts({{0, 0}, {1, 0}});
  CHECK_THROWS_AS(knn(pts, 0, 2), SizeError);
  CHECK_THROWS_AS(PointSet({{0, 0}, {1, 0, 2}}), SchemaError);
}

TEST_CASE("knn matches exhaustive sort") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto raw = random_cloud(100, 3, seed);
    PointSet pts(raw);
    for (std::size_t q = 0; q < raw.size(); q += 7) {
      CHECK(knn(pts, q, 10) == oracle::brute_knn(raw, q, 10));
    }
  }
}

TEST_CASE("knn ties go to the lower index") {
  PointSet pts({{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  CHECK(knn(pts, 0, 2) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("mean_direction examples") {
  auto md = mean_direction(Vector{1, 1}, {{0, 1}, {1, 0}});
  CHECK(md.magnitude == doctest::Approx(std::sqrt(2.0) / 2.0));
  REQUIRE(md.unit_normal);
  CHECK((*md.unit_normal)[0] == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK((*md.unit_normal)[1] == doctest::Approx(std::sqrt(2.0) / 2.0));

  auto flat = mean_direction(Vector{0, 0}, {{1, 0}, {-1, 0}});
  CHECK(flat.magnitude == doctest::Approx(0.0));
  CHECK_FALSE(flat.unit_normal);

  CHECK_THROWS_AS(mean_direction(Vector{0, 0}, {{0, 0}, {0, 0}}), DegenerateError);
}

TEST_CASE("mean_direction magnitude stays within [0,1]") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector p{rng.uniform(), rng.uniform(), rng.uniform()};
    std::vector<Vector> nb(1 + rng.index(12), Vector(3));
    for (auto& v : nb)
      for (auto& c : v) c = rng.uniform();
    auto md = mean_direction(p, nb);
    CHECK(md.magnitude >= 0.0);
    CHECK(md.magnitude <= 1.0 + 1e-12);
  }
}

TEST_CASE("edge_detect on square corners plus center") {
  auto edges = edge_detect(square_with_center(), {4, 0.5});
  std::set<std::size_t> sources;
  for (const auto& e : edges) sources.insert(e.source_index);
  CHECK(sources == std::set<std::size_t>{0, 1, 2, 3});
  for (const auto& e : edges) {
    if (e.source_index != 0) continue;
    CHECK(e.normal[0] < 0.0);
    CHECK(e.normal[1] < 0.0);
    CHECK(e.normal[0] == doctest::Approx(e.normal[1]));
  }
}

TEST_CASE("edge_detect recalls disk hull vertices") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto raw = disk(200, seed);
    auto hull = oracle::convex_hull(raw);
    auto edges = edge_detect(PointSet(raw), {10, 0.3});
    std::set<std::size_t> flagged;
    for (const auto& e : edges) flagged.insert(e.source_index);
    std::size_t hit = 0;
    for (auto h : hull) hit += flagged.count(h);
    CHECK(static_cast<double>(hit) / hull.size() >= 0.9);
  }
}

TEST_CASE("edge sets shrink as tau grows and normals are unit length") {
  auto raw = random_cloud(150, 2, 3);
  PointSet pts(raw);
  std::set<std::size_t> prev;
  bool first = true;
  for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    std::set<std::size_t> cur;
    for (const auto& e : edge_detect(pts, {10, tau})) {
      cur.insert(e.source_index);
      CHECK(norm2(e.normal) == doctest::Approx(1.0).epsilon(1e-12));
    }
    if (!first) CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    prev = cur;
    first = false;
  }
}

TEST_CASE("duplicate points do not break edge detection") {
  PointSet pts({{0, 0}, {0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK_NOTHROW(edge_detect(pts, {2, 0.5}));
  PointSet all_same({{0, 0}, {0, 0}, {0, 0}});
  CHECK(edge_detect(all_same, {2, 0.5}).empty());
}
