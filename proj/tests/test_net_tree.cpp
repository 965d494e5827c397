#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "dynspanner/net_tree.hpp"
#include "dynspanner/oracle.hpp"

using namespace dynspanner;

namespace {

constexpr double kFactor = 64;

std::vector<PointId> ids(std::initializer_list<std::uint32_t> xs) {
  std::vector<PointId> out;
  for (auto x : xs) out.push_back(PointId{x});
  return out;
}

std::vector<PointId> brute_ball(const NetHierarchy& net, int level, PointId x, double r) {
  std::vector<PointId> out;
  for (PointId p : net.sorted_members(level)) {
    if (net.space().distance(x, p) <= r) out.push_back(p);
  }
  return out;
}

// Levels of the path 0..n-1 where level i holds the multiples of 2^i.
std::vector<std::vector<PointId>> multiples(std::uint32_t n, int top) {
  std::vector<std::vector<PointId>> levels;
  for (int i = 0; i <= top; ++i) {
    std::vector<PointId> level;
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j % (1u << i) == 0) level.push_back(PointId{j});
    }
    levels.push_back(level);
  }
  return levels;
}

MetricSpace path_space(std::uint32_t n, double phi, double offset = 0) {
  MetricSpace space(1, phi);
  for (std::uint32_t j = 0; j < n; ++j) {
    space.activate(space.add_point(std::vector<double>{j + offset}));
  }
  return space;
}

void check_valid(const NetHierarchy& net) {
  const auto v = oracle::validate_net_hierarchy(net, net.space());
  for (const auto& p : v.problems) INFO(p);
  CHECK(v.ok);
}

}  // namespace

TEST_CASE("insert into an empty hierarchy joins every level") {
  MetricSpace space(1, 8);
  const PointId x = space.add_point(std::vector<double>{0});
  space.activate(x);
  NetHierarchy net(space, kFactor);
  const auto changes = net.insert_point(x);
  CHECK(changes.size() == 4);
  CHECK(net.top_of(x) == 3);
  check_valid(net);
}

TEST_CASE("insert stops below the first level within reach") {
  MetricSpace space(1, 8);
  const PointId o = space.add_point(std::vector<double>{0});
  const PointId five = space.add_point(std::vector<double>{5});
  space.activate(o);
  NetHierarchy net(space, kFactor);
  net.insert_point(o);

  space.activate(five);
  const auto changes = net.insert_point(five);
  CHECK(net.top_of(five) == 2);
  REQUIRE(changes.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(changes[i] == NetChange{i, five, true});

  MetricSpace space2(1, 8);
  space2.activate(space2.add_point(std::vector<double>{0}));
  space2.activate(space2.add_point(std::vector<double>{1}));
  NetHierarchy net2(space2, kFactor);
  net2.insert_point(PointId{0});
  net2.insert_point(PointId{1});
  CHECK(net2.top_of(PointId{1}) == 0);
}

TEST_CASE("insert errors") {
  MetricSpace space(1, 8);
  const PointId a = space.add_point(std::vector<double>{0});
  NetHierarchy net(space, kFactor);
  CHECK_THROWS(net.insert_point(a));
  space.activate(a);
  net.insert_point(a);
  CHECK_THROWS(net.insert_point(a));
  CHECK_THROWS(net.delete_point(PointId{9}));
}

TEST_CASE("radius factor below 2 is rejected") {
  MetricSpace space(1, 8);
  CHECK_THROWS_AS(NetHierarchy(space, 1.5), std::invalid_argument);
}

TEST_CASE("delete the only point empties every level") {
  MetricSpace space(1, 8);
  const PointId a = space.add_point(std::vector<double>{0});
  space.activate(a);
  NetHierarchy net(space, kFactor);
  net.insert_point(a);
  space.deactivate(a);
  const auto changes = net.delete_point(a);
  CHECK(changes.size() == 4);
  for (int i = 0; i <= 3; ++i) CHECK(net.members(i).empty());
  check_valid(net);
}

TEST_CASE("delete promotes the orphan to the vacated levels") {
  MetricSpace space(1, 8);
  const PointId o = space.add_point(std::vector<double>{0});
  const PointId five = space.add_point(std::vector<double>{5});
  space.activate(o);
  space.activate(five);
  NetHierarchy net(space, kFactor);
  net.insert_point(o);
  net.insert_point(five);
  REQUIRE(net.top_of(five) == 2);
  space.deactivate(o);
  const auto changes = net.delete_point(o);
  CHECK(net.top_of(five) == 3);
  const NetChange promoted{3, five, true};
  CHECK(std::count(changes.begin(), changes.end(), promoted) == 1);
  check_valid(net);
}

TEST_CASE("delete with a chain of promotions") {
  MetricSpace space(1, 8);
  for (double x : {0.0, 3.0, 5.0}) space.activate(space.add_point(std::vector<double>{x}));
  auto net = NetHierarchy::from_levels(space, kFactor,
                                       {ids({0, 1, 2}), ids({0, 1, 2}), ids({0, 2}), ids({0})});
  check_valid(net);
  space.deactivate(PointId{0});
  const auto changes = net.delete_point(PointId{0});
  check_valid(net);
  CHECK(oracle::check_net_locality(space, changes, PointId{0}, OpKind::remove).ok);
  for (const NetChange& ch : changes) {
    if (!ch.added) CHECK(ch.point == PointId{0});
  }
}

TEST_CASE("ball examples") {
  // points 1..16 at coordinate = id + 1
  MetricSpace space = path_space(16, 16, 1);
  auto p = [](int x) { return PointId{static_cast<std::uint32_t>(x - 1)}; };
  std::vector<PointId> evens, n2, n3;
  for (int x = 2; x <= 16; x += 2) evens.push_back(p(x));
  for (int x : {4, 8, 12, 16}) n2.push_back(p(x));
  for (int x : {8, 16}) n3.push_back(p(x));
  auto net = NetHierarchy::from_levels(space, 2, {space.active_points(), evens, n2, n3, {p(16)}});
  check_valid(net);

  CHECK(net.ball(2, p(8), 5) == std::vector<PointId>{p(4), p(8), p(12)});
  CHECK(net.ball(2, p(8), 0) == std::vector<PointId>{p(8)});
  CHECK(net.ball(2, p(7), 5) == std::vector<PointId>{p(4), p(8), p(12)});
  CHECK(net.ball(1, p(1), 0.5).empty());
  CHECK_THROWS_AS(net.ball(2, p(8), 9), std::invalid_argument);
  CHECK(net.search(2, p(8), 9) == brute_ball(net, 2, p(8), 9));
  CHECK_THROWS_AS(net.ball(5, p(8), 1), std::out_of_range);
}

TEST_CASE("multiples path hierarchy is valid") {
  MetricSpace space = path_space(16, 16);
  auto net = NetHierarchy::from_levels(space, kFactor, multiples(16, 4));
  check_valid(net);
}

TEST_CASE("packing violation is reported") {
  MetricSpace space(1, 8);
  for (double x : {0.0, 3.0}) space.activate(space.add_point(std::vector<double>{x}));
  auto net = NetHierarchy::from_levels(space, kFactor,
                                       {ids({0, 1}), ids({0, 1}), ids({0, 1}), ids({0})});
  const auto v = oracle::validate_net_hierarchy(net, space);
  CHECK_FALSE(v.ok);
}

TEST_CASE("dump lists sorted members per level") {
  MetricSpace space = path_space(4, 4);
  auto net = NetHierarchy::from_levels(space, kFactor, multiples(4, 2));
  CHECK(net.dump() == "0: 0 1 2 3\n1: 0 2\n2: 0\n");
}

TEST_CASE("random updates keep the hierarchy valid and local") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0, 180);
    MetricSpace space(2, 256);
    NetHierarchy net(space, kFactor);
    std::vector<PointId> alive;
    for (int step = 0; step < 150; ++step) {
      const bool del = !alive.empty() && std::bernoulli_distribution(0.35)(rng);
      PointId x;
      NetChangeset changes;
      OpKind op;
      if (del) {
        const std::size_t at = std::uniform_int_distribution<std::size_t>(0, alive.size() - 1)(rng);
        x = alive[at];
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(at));
        space.deactivate(x);
        changes = net.delete_point(x);
        op = OpKind::remove;
      } else {
        x = space.add_point(std::vector<double>{coord(rng), coord(rng)});
        space.activate(x);
        if (!validate_bounded(space).ok) {
          space.deactivate(x);
          continue;
        }
        changes = net.insert_point(x);
        alive.push_back(x);
        op = OpKind::insert;
      }
      const auto valid = oracle::validate_net_hierarchy(net, space);
      REQUIRE(valid.ok);
      const auto local = oracle::check_net_locality(space, changes, x, op);
      REQUIRE(local.ok);

      // neighbor lists are symmetric and complete up to the maintained radius
      for (int i = 0; i <= net.top_level(); ++i) {
        for (PointId p : net.members(i)) {
          std::vector<PointId> listed;
          for (const Neighbor& nb : net.neighbors(p, i)) listed.push_back(nb.id);
          std::sort(listed.begin(), listed.end());
          auto expect = brute_ball(net, i, p, net.neighbor_radius(i));
          expect.erase(std::find(expect.begin(), expect.end(), p));
          REQUIRE(listed == expect);
        }
      }
      // ball queries agree with a scan, from members and from arbitrary points
      const int level = std::uniform_int_distribution<int>(0, net.top_level())(rng);
      const double r = std::uniform_real_distribution<double>(0, net.neighbor_radius(level))(rng);
      CHECK(net.ball(level, x, r) == brute_ball(net, level, x, r));
    }
  }
}
