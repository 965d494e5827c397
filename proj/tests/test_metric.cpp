#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "dynspanner/metric.hpp"

using namespace dynspanner;

namespace {

MetricSpace line(std::initializer_list<double> xs, double phi) {
  MetricSpace space(1, phi);
  for (double x : xs) space.activate(space.add_point(std::vector<double>{x}));
  return space;
}

}  // namespace

TEST_CASE("distance examples") {
  MetricSpace space(2, 8);
  const PointId a = space.add_point(std::vector<double>{0, 0});
  const PointId b = space.add_point(std::vector<double>{3, 4});
  CHECK(space.distance(a, a) == 0.0);
  CHECK(space.distance(a, b) == 5.0);
  CHECK(space.distance(b, a) == 5.0);

  MetricSpace l = line({3, 7}, 8);
  CHECK(l.distance(PointId{0}, PointId{1}) == 4.0);
}

TEST_CASE("distance to an unknown id throws") {
  MetricSpace space(1, 8);
  space.add_point(std::vector<double>{0});
  CHECK_THROWS_AS(space.distance(PointId{0}, PointId{5}), std::out_of_range);
}

TEST_CASE("deleted points keep their coordinates") {
  MetricSpace space = line({0, 6}, 8);
  space.deactivate(PointId{1});
  CHECK_FALSE(space.is_active(PointId{1}));
  CHECK(space.distance(PointId{0}, PointId{1}) == 6.0);
  CHECK(space.active_count() == 1);
}

TEST_CASE("ids are never reused") {
  MetricSpace space(1, 8);
  const PointId a = space.add_point(std::vector<double>{1});
  CHECK_THROWS(space.add_point(a, std::vector<double>{2}));
  const PointId b = space.add_point(std::vector<double>{2});
  CHECK(b.value == 1);
  space.add_point(PointId{7}, std::vector<double>{3});
  CHECK(space.add_point(std::vector<double>{4}).value == 8);
}

TEST_CASE("coordinate dimension is checked") {
  MetricSpace space(2, 8);
  CHECK_THROWS_AS(space.add_point(std::vector<double>{1}), std::invalid_argument);
}

TEST_CASE("phi must be a power of two") {
  CHECK_THROWS_AS(MetricSpace(1, 12), std::invalid_argument);
  CHECK_THROWS_AS(MetricSpace(1, 0), std::invalid_argument);
  CHECK(MetricSpace(1, 1024).log2_phi() == 10);
  CHECK(MetricSpace(1, 1024).max_scale() == 11);
}

TEST_CASE("scale_of examples") {
  CHECK(scale_of(1.0) == 1);
  CHECK(scale_of(0.75) == 0);
  CHECK(scale_of(7.9) == 3);
  CHECK(scale_of(8.0) == 4);
  CHECK_THROWS_AS(scale_of(0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_of(-1.0), std::invalid_argument);
}

TEST_CASE("scale_of powers of two") {
  for (int k = 0; k < 40; ++k) {
    CAPTURE(k);
    CHECK(scale_of(std::ldexp(1.0, k)) == k + 1);
    CHECK(scale_of(std::nextafter(std::ldexp(1.0, k), 0.0)) == k);
  }
}

TEST_CASE("validate_bounded") {
  CHECK(validate_bounded(MetricSpace(1, 8)).ok);

  const auto close = validate_bounded(line({0, 0.5}, 8));
  CHECK_FALSE(close.ok);
  REQUIRE(close.violations.size() == 1);
  CHECK(close.violations[0].distance == 0.5);

  MetricSpace path(1, 16);
  for (int x = 1; x <= 16; ++x) path.activate(path.add_point(std::vector<double>{double(x)}));
  CHECK(validate_bounded(path).ok);

  CHECK_FALSE(validate_bounded(line({0, 9}, 8)).ok);
}

TEST_CASE("validate_bounded ignores inactive points") {
  MetricSpace space = line({0, 0.5, 3}, 8);
  space.deactivate(PointId{1});
  CHECK(validate_bounded(space).ok);
}

TEST_CASE("triangle inequality on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-100, 100);
  MetricSpace space(3, 1024);
  for (int k = 0; k < 60; ++k) {
    space.add_point(std::vector<double>{coord(rng), coord(rng), coord(rng)});
  }
  std::uniform_int_distribution<std::uint32_t> pick(0, 59);
  for (int t = 0; t < 2000; ++t) {
    const PointId a{pick(rng)}, b{pick(rng)}, c{pick(rng)};
    CHECK(space.distance(a, c) <= space.distance(a, b) + space.distance(b, c) + 1e-9);
    CHECK(space.distance(a, b) == space.distance(b, a));
  }
}

TEST_CASE("scales of a validated space lie in [1, log2 phi + 1]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(0, 181);
  MetricSpace space(2, 256);
  while (space.active_count() < 40) {
    const std::vector<double> p{coord(rng), coord(rng)};
    const PointId id = space.add_point(p);
    space.activate(id);
    if (!validate_bounded(space).ok) space.deactivate(id);
  }
  const auto pts = space.active_points();
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const int s = scale_of(space.distance(pts[a], pts[b]));
      CHECK(s >= 1);
      CHECK(s <= space.max_scale());
    }
  }
}

TEST_CASE("distance matrix backend") {
  auto space = MetricSpace::from_distance_matrix({{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}}, 2);
  CHECK(space.is_matrix_backed());
  CHECK(space.distance(PointId{0}, PointId{2}) == 2.0);
  CHECK(space.distance(PointId{2}, PointId{1}) == 1.5);
  CHECK_THROWS(MetricSpace::from_distance_matrix({{0, 1}, {2, 0}}, 2));
  CHECK_THROWS(MetricSpace::from_distance_matrix({{0, 1}, {1, 0}, {1, 1}}, 2));
}

TEST_CASE("point file parsing") {
  std::istringstream in("# comment\n\n3 1.5 2\n9 0 -1\n");
  const auto records = read_point_file(in);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id.value == 3);
  CHECK(records[0].coords == std::vector<double>{1.5, 2});
  CHECK(records[1].id.value == 9);

  std::istringstream ragged("1 0 0\n2 1\n");
  CHECK_THROWS(read_point_file(ragged));
}
