#include "dynspanner/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace dynspanner::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compact adjacency over the ids that appear in an edge list.
class Graph {
 public:
  explicit Graph(std::span<const WeightedEdge> edges) {
    for (const WeightedEdge& e : edges) {
      const std::size_t a = slot(e.u);
      const std::size_t b = slot(e.v);
      adj_[a].push_back({b, e.w});
      adj_[b].push_back({a, e.w});
    }
  }

  // Distances from src to every reachable vertex, keyed by id.
  std::unordered_map<std::uint32_t, double> from(PointId src) const {
    std::unordered_map<std::uint32_t, double> out;
    auto it = index_.find(src.value);
    if (it == index_.end()) return out;
    std::vector<double> dist(ids_.size(), kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[it->second] = 0.0;
    heap.push({0.0, it->second});
    while (!heap.empty()) {
      const auto [d, at] = heap.top();
      heap.pop();
      if (d > dist[at]) continue;
      for (const auto& [to, w] : adj_[at]) {
        if (d + w < dist[to]) {
          dist[to] = d + w;
          heap.push({dist[to], to});
        }
      }
    }
    for (std::size_t a = 0; a < ids_.size(); ++a) {
      if (dist[a] < kInf) out.emplace(ids_[a], dist[a]);
    }
    return out;
  }

 private:
  std::size_t slot(PointId p) {
    auto [it, fresh] = index_.try_emplace(p.value, ids_.size());
    if (fresh) {
      ids_.push_back(p.value);
      adj_.emplace_back();
    }
    return it->second;
  }

  std::unordered_map<std::uint32_t, std::size_t> index_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
};

double lookup(const std::unordered_map<std::uint32_t, double>& dist, PointId p) {
  auto it = dist.find(p.value);
  return it == dist.end() ? kInf : it->second;
}

std::vector<WeightedEdge> below_scale(std::span<const SpannerEdge> light, int scale) {
  std::vector<WeightedEdge> out;
  for (const SpannerEdge& e : light) {
    if (e.scale < scale) out.push_back({e.u, e.v, e.length});
  }
  return out;
}

// Exact distance over L edges of scale < scale(u,v), for many pairs at once:
// one Dijkstra per (scale, source).
std::map<EdgeKey, double> batch_dstar(const MetricSpace& space,
                                      std::span<const SpannerEdge> light,
                                      const std::vector<EdgeKey>& pairs) {
  std::map<int, std::map<PointId, std::vector<PointId>>> grouped;
  for (EdgeKey key : pairs) {
    grouped[scale_of(space.distance(key.lo, key.hi))][key.lo].push_back(key.hi);
  }
  std::map<EdgeKey, double> out;
  for (const auto& [scale, by_source] : grouped) {
    const Graph graph(below_scale(light, scale));
    for (const auto& [src, targets] : by_source) {
      const auto dist = graph.from(src);
      for (PointId t : targets) out[EdgeKey{src, t}] = lookup(dist, t);
    }
  }
  return out;
}

bool exceeds(double value, double threshold) {
  return value > threshold * (1.0 + kTolerance);
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

std::vector<WeightedEdge> weighted(std::span<const SpannerEdge> edges) {
  std::vector<WeightedEdge> out;
  out.reserve(edges.size());
  for (const SpannerEdge& e : edges) out.push_back({e.u, e.v, e.length});
  return out;
}

double graph_distance(std::span<const WeightedEdge> edges, PointId u, PointId v) {
  if (u == v) return 0.0;
  return lookup(Graph(edges).from(u), v);
}

std::vector<std::vector<double>> floyd_warshall(std::size_t n,
                                                std::span<const WeightedEdge> edges) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t a = 0; a < n; ++a) d[a][a] = 0.0;
  for (const WeightedEdge& e : edges) {
    d[e.u.value][e.v.value] = std::min(d[e.u.value][e.v.value], e.w);
    d[e.v.value][e.u.value] = std::min(d[e.v.value][e.u.value], e.w);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      if (d[a][k] == kInf) continue;
      for (std::size_t b = 0; b < n; ++b) {
        d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
      }
    }
  }
  return d;
}

double dstar(const MetricSpace& space, std::span<const SpannerEdge> light, PointId u,
             PointId v) {
  if (u == v) return 0.0;
  const int scale = scale_of(space.distance(u, v));
  return graph_distance(below_scale(light, scale), u, v);
}

ViolationReport check_invariants(const MetricSpace& space,
                                 std::span<const SpannerEdge> net_spanner,
                                 std::span<const SpannerEdge> light, double eps) {
  ViolationReport report;
  std::vector<EdgeKey> in_s;
  for (const SpannerEdge& e : net_spanner) in_s.push_back(e.key());
  std::sort(in_s.begin(), in_s.end());
  std::vector<EdgeKey> in_l;
  for (const SpannerEdge& e : light) {
    in_l.push_back(e.key());
    if (!std::binary_search(in_s.begin(), in_s.end(), e.key())) {
      report.violations.push_back({e.key(), Invariant::subset, kInf, 0.0});
    }
  }
  std::sort(in_l.begin(), in_l.end());

  const auto exact = batch_dstar(space, light, in_s);
  for (const SpannerEdge& e : net_spanner) {
    const double d = space.distance(e.u, e.v);
    const double ds = exact.at(e.key());
    if (std::binary_search(in_l.begin(), in_l.end(), e.key())) {
      const double threshold = (1.0 + eps / 3.0) * d;
      if (!(ds > threshold * (1.0 - kTolerance))) {
        report.violations.push_back({e.key(), Invariant::lightness, ds, threshold});
      }
    } else {
      const double threshold = (1.0 + eps) * d;
      if (exceeds(ds, threshold)) {
        report.violations.push_back({e.key(), Invariant::stretch, ds, threshold});
      }
    }
  }
  return report;
}

double mst_weight(const MetricSpace& space) {
  const auto points = space.active_points();
  return mst_weight(space, points);
}

double mst_weight(const MetricSpace& space, std::span<const PointId> points) {
  const std::size_t n = points.size();
  if (n < 2) return 0.0;
  std::vector<double> best(n, kInf);
  std::vector<char> done(n, 0);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t pick = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!done[a] && (pick == n || best[a] < best[pick])) pick = a;
    }
    done[pick] = 1;
    total += best[pick];
    for (std::size_t a = 0; a < n; ++a) {
      if (!done[a]) best[a] = std::min(best[a], space.distance(points[pick], points[a]));
    }
  }
  return total;
}

double mst_weight_kruskal(const MetricSpace& space, std::span<const PointId> points) {
  struct Pair {
    double w;
    std::size_t a;
    std::size_t b;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      pairs.push_back({space.distance(points[a], points[b]), a, b});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.w < y.w; });
  UnionFind uf(points.size());
  double total = 0.0;
  for (const Pair& p : pairs) {
    if (uf.unite(p.a, p.b)) total += p.w;
  }
  return total;
}

double max_stretch(const MetricSpace& space, std::span<const SpannerEdge> light) {
  const auto points = space.active_points();
  const Graph graph(weighted(light));
  double worst = 1.0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    const auto dist = graph.from(points[a]);
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const double ratio = lookup(dist, points[b]) / space.distance(points[a], points[b]);
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

NetValidation validate_net_hierarchy(const NetHierarchy& net, const MetricSpace& space) {
  NetValidation out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.problems.push_back(std::move(msg));
  };
  if (net.sorted_members(0) != space.active_points()) {
    fail("level 0 differs from the active point set");
  }
  for (int i = 1; i <= net.top_level(); ++i) {
    const auto level = net.sorted_members(i);
    const auto below = net.sorted_members(i - 1);
    const double r = pow2(i);
    for (PointId p : level) {
      if (!std::binary_search(below.begin(), below.end(), p)) {
        fail("level " + std::to_string(i) + ": " + to_string(p) + " missing from level " +
             std::to_string(i - 1));
      }
    }
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const double d = space.distance(level[a], level[b]);
        if (d < r) {
          std::ostringstream msg;
          msg << "level " << i << ": packing " << level[a].value << ' ' << level[b].value
              << " at " << d;
          fail(msg.str());
        }
      }
    }
    for (PointId p : below) {
      const bool covered = std::any_of(level.begin(), level.end(), [&](PointId q) {
        return space.distance(p, q) <= r;
      });
      if (!covered) {
        fail("level " + std::to_string(i) + ": " + to_string(p) + " uncovered");
      }
    }
  }
  return out;
}

NetValidation check_net_locality(const MetricSpace& space, const NetChangeset& changes,
                                 PointId updated, OpKind op) {
  NetValidation out;
  for (const NetChange& ch : changes) {
    std::ostringstream msg;
    if (ch.point != updated && space.distance(ch.point, updated) > pow2(ch.level)) {
      msg << "level " << ch.level << ": change at " << ch.point.value << " is "
          << space.distance(ch.point, updated) << " from " << updated.value;
    } else if (op == OpKind::remove && !ch.added && ch.point != updated) {
      msg << "level " << ch.level << ": deletion of " << updated.value << " removed "
          << ch.point.value;
    } else if (op == OpKind::insert && ch.point != updated) {
      msg << "level " << ch.level << ": insertion of " << updated.value << " changed "
          << ch.point.value;
    }
    if (!msg.str().empty()) {
      out.ok = false;
      out.problems.push_back(msg.str());
    }
  }
  return out;
}

std::vector<EdgeKey> net_spanner_edges(const NetHierarchy& net, double eps) {
  const MetricSpace& space = net.space();
  const double c = 4.0 + 16.0 / eps;
  const auto points = net.sorted_members(0);
  std::vector<EdgeKey> out;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      const int level = std::min(net.top_of(points[a]), net.top_of(points[b]));
      if (space.distance(points[a], points[b]) <= c * pow2(level)) {
        out.push_back(EdgeKey{points[a], points[b]});
      }
    }
  }
  return out;
}

bool is_coarse_approx(double estimate, double exact, double base, double alpha) {
  if (exact <= 2.0 * base) {
    return estimate >= exact * (1.0 - kTolerance) &&
           estimate <= alpha * exact * (1.0 + kTolerance);
  }
  return estimate >= 2.0 * base * (1.0 - kTolerance);
}

std::vector<WeightedEdge> greedy_spanner_reference(std::span<const WeightedEdge> edges,
                                                   double t) {
  std::vector<WeightedEdge> order(edges.begin(), edges.end());
  auto key = [](const WeightedEdge& e) {
    return std::tuple(e.w, std::min(e.u, e.v), std::max(e.u, e.v));
  };
  std::sort(order.begin(), order.end(),
            [&](const WeightedEdge& a, const WeightedEdge& b) { return key(a) < key(b); });
  std::vector<WeightedEdge> kept;
  for (const WeightedEdge& e : order) {
    if (graph_distance(kept, e.u, e.v) > t * e.w) kept.push_back(e);
  }
  return kept;
}

EstimateSweep check_estimates(const MetricSpace& space, std::span<const SpannerEdge> light,
                              const EstimateStore& store) {
  EstimateSweep sweep;
  std::vector<EdgeKey> pairs;
  for (const auto& [key, entry] : store.dstar_entries()) pairs.push_back(key);
  std::sort(pairs.begin(), pairs.end());
  const auto exact = batch_dstar(space, light, pairs);
  for (EdgeKey key : pairs) {
    const EstimateEntry& entry = *store.dstar(key);
    const double ds = exact.at(key);
    ++sweep.dstar_checked;
    if (!is_coarse_approx(entry.value, ds, space.distance(key.lo, key.hi), entry.alpha)) {
      sweep.failures.push_back({key, true, entry.value, ds, entry.alpha});
    }
  }

  std::map<PointId, std::vector<PointId>> by_source;
  for (const auto& [key, entry] : store.dl_entries()) by_source[key.lo].push_back(key.hi);
  const Graph graph(weighted(light));
  for (const auto& [src, targets] : by_source) {
    const auto dist = graph.from(src);
    for (PointId t : targets) {
      const EdgeKey key{src, t};
      const EstimateEntry& entry = *store.dl(key);
      const double dl = lookup(dist, t);
      ++sweep.dl_checked;
      const bool ok = entry.value >= dl * (1.0 - kTolerance) &&
                      entry.value <= entry.alpha * dl * (1.0 + kTolerance);
      if (!ok) sweep.failures.push_back({key, false, entry.value, dl, entry.alpha});
    }
  }
  std::sort(sweep.failures.begin(), sweep.failures.end(),
            [](const EstimateFailure& a, const EstimateFailure& b) {
              return std::pair(a.edge, a.is_dstar) < std::pair(b.edge, b.is_dstar);
            });
  return sweep;
}

std::vector<EdgeKey> check_distance_stability(const MetricSpace& space,
                                              std::span<const SpannerEdge> net_spanner,
                                              std::span<const SpannerEdge> light_before,
                                              std::span<const SpannerEdge> light_after,
                                              PointId updated) {
  std::vector<EdgeKey> pairs;
  for (const SpannerEdge& e : net_spanner) {
    const double r = 4.0 * pow2(e.scale);
    if (space.distance(e.u, updated) > r || space.distance(e.v, updated) > r) {
      pairs.push_back(e.key());
    }
  }
  const auto before = batch_dstar(space, light_before, pairs);
  const auto after = batch_dstar(space, light_after, pairs);
  std::vector<EdgeKey> unstable;
  for (EdgeKey key : pairs) {
    const double a = before.at(key);
    const double b = after.at(key);
    const double limit = 2.0 * space.distance(key.lo, key.hi);
    const bool same =
        a == b || (std::isfinite(a) && std::isfinite(b) &&
                   std::abs(a - b) <= kTolerance * std::max(a, b));
    const bool both_far = exceeds(a, limit) && exceeds(b, limit);
    if (!same && !both_far) unstable.push_back(key);
  }
  return unstable;
}

}  // namespace dynspanner::oracle
