#include "dynspanner/light_spanner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "dynspanner/oracle.hpp"

namespace dynspanner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_small_eps(const MetricSpace& space, const LightSpannerOptions& options) {
  if (!(options.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (options.kappa * 3 < 1024) throw std::invalid_argument("kappa must be >= 1024/3");
  if (space.log2_phi() < 1) throw std::invalid_argument("phi must be at least 2");
  return small_eps(options.eps, options.kappa, space.log2_phi());
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::exact ? "exact" : "fast"; }
std::string to_string(OpKind op) { return op == OpKind::insert ? "insert" : "delete"; }

double small_eps(double eps, int kappa, int log2_phi) {
  return eps / (3.0 * kappa * log2_phi);
}

const EstimateEntry* EstimateStore::dstar(EdgeKey key) const {
  auto it = dstar_.find(key);
  return it == dstar_.end() ? nullptr : &it->second;
}

const EstimateEntry* EstimateStore::dl(EdgeKey key) const {
  auto it = dl_.find(key);
  return it == dl_.end() ? nullptr : &it->second;
}

void EstimateStore::erase(EdgeKey key) {
  dstar_.erase(key);
  dl_.erase(key);
}

// Dense sketch graph H over a handful of nearby points; distances are
// answered by O(m^2) Dijkstra, memoized per source.
class LightSpanner::Sketch {
 public:
  explicit Sketch(std::vector<PointId> vertices)
      : vertices_(std::move(vertices)),
        weight_(vertices_.size() * vertices_.size(), kInf) {}

  std::size_t size() const { return vertices_.size(); }
  PointId vertex(std::size_t a) const { return vertices_[a]; }
  void set_edge(std::size_t a, std::size_t b, double w) {
    weight_[a * size() + b] = w;
    weight_[b * size() + a] = w;
  }

  double distance(PointId u, PointId v, std::uint64_t& relaxations) const {
    if (u == v) return 0.0;
    const std::size_t src = index_of(u);
    const std::size_t dst = index_of(v);
    auto it = cache_.find(src);
    if (it == cache_.end()) it = cache_.emplace(src, run(src, {}, relaxations)).first;
    return it->second[dst];
  }

  // Distances from u to each target; stops once all targets are settled.
  std::vector<double> distances(PointId u, std::span<const PointId> targets,
                                std::uint64_t& relaxations) const {
    std::vector<std::size_t> wanted;
    for (PointId t : targets) wanted.push_back(index_of(t));
    const std::vector<double> dist = run(index_of(u), wanted, relaxations);
    std::vector<double> out;
    for (std::size_t a : wanted) out.push_back(dist[a]);
    return out;
  }

 private:
  std::size_t index_of(PointId p) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), p);
    if (it == vertices_.end() || *it != p) {
      throw std::logic_error("sketch graph lacks vertex " + to_string(p));
    }
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  // Dense Dijkstra; with a nonempty `wanted` it may stop early, leaving
  // unsettled entries as upper bounds.
  std::vector<double> run(std::size_t src, const std::vector<std::size_t>& wanted,
                          std::uint64_t& relaxations) const {
    const std::size_t m = size();
    std::vector<double> dist(m, kInf);
    std::vector<char> done(m, 0);
    std::vector<char> want(m, 0);
    std::size_t pending = 0;
    for (std::size_t a : wanted) {
      if (!want[a]) ++pending;
      want[a] = 1;
    }
    dist[src] = 0.0;
    for (std::size_t round = 0; round < m; ++round) {
      std::size_t best = m;
      for (std::size_t a = 0; a < m; ++a) {
        if (!done[a] && dist[a] < kInf && (best == m || dist[a] < dist[best])) best = a;
      }
      if (best == m) break;
      done[best] = 1;
      if (want[best] && --pending == 0) break;
      const double* row = weight_.data() + best * m;
      for (std::size_t a = 0; a < m; ++a) {
        if (done[a] || row[a] == kInf) continue;
        ++relaxations;
        dist[a] = std::min(dist[a], dist[best] + row[a]);
      }
    }
    return dist;
  }

  std::vector<PointId> vertices_;
  std::vector<double> weight_;
  mutable std::unordered_map<std::size_t, std::vector<double>> cache_;
};

LightSpanner::LightSpanner(const MetricSpace& space, LightSpannerOptions options)
    : space_(&space),
      options_(options),
      eps_small_(checked_small_eps(space, options)),
      net_(space, spanner_constant(eps_small_)),
      spanner_(net_, options.eps) {
  if (options_.mode == Mode::fast) small_.emplace(net_, eps_small_);
}

double LightSpanner::estimate_alpha(int scale) const {
  return 1.0 + options_.kappa * scale * eps_small_;
}

UpdateReport LightSpanner::insert(PointId x) { return apply(OpKind::insert, x); }

UpdateReport LightSpanner::remove(PointId x) {
  if (!net_.contains(x)) {
    throw std::invalid_argument("remove: point " + to_string(x) + " not present");
  }
  return apply(OpKind::remove, x);
}

UpdateReport LightSpanner::apply(OpKind op, PointId x) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t balls_before = net_.ball_queries();
  const std::uint64_t relax_before = relaxations_;
  const std::uint64_t estimates_before = estimate_calls_;
  const std::uint64_t sketch_before = sketch_vertices_;

  Tracker tracker;
  tracker_ = &tracker;
  UpdateReport report;
  report.op = op;
  report.id = x;
  try {
    report.net_changes =
        op == OpKind::insert ? net_.insert_point(x) : net_.delete_point(x);
    if (op == OpKind::remove && x.value < adj_.size()) {
      std::vector<EdgeKey> incident;
      for (const Adjacent& a : adj_[x.value]) incident.push_back(EdgeKey{x, a.to});
      for (EdgeKey key : incident) set_membership(key, false, nullptr);
    }
    if (small_) {
      for (EdgeKey key : small_->sync(report.net_changes).removed) store_.erase(key);
    }
    for (EdgeKey key : spanner_.sync(report.net_changes).removed) {
      set_membership(key, false, nullptr);
    }
    if (!options_.skip_recompute) {
      if (options_.mode == Mode::exact) {
        recompute(x);
      } else {
        recompute_fast(x);
      }
    }
  } catch (...) {
    tracker_ = nullptr;
    throw;
  }
  tracker_ = nullptr;

  for (const auto& [key, was_in] : tracker) {
    const bool now_in = edges_.contains(key);
    if (now_in && !was_in) report.added.push_back(key);
    if (!now_in && was_in) report.removed.push_back(key);
  }
  std::sort(report.added.begin(), report.added.end());
  std::sort(report.removed.begin(), report.removed.end());
  report.recourse = report.added.size() + report.removed.size();
  report.counters.ball_queries = net_.ball_queries() - balls_before;
  report.counters.dijkstra_relaxations = relaxations_ - relax_before;
  report.counters.estimate_calls = estimate_calls_ - estimates_before;
  report.counters.sketch_vertices = sketch_vertices_ - sketch_before;
  report.time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

void LightSpanner::add_l_edge(EdgeKey key, double length, int scale) {
  edges_.emplace(key, LEdge{length, scale});
  const std::uint32_t need = std::max(key.lo.value, key.hi.value) + 1;
  if (adj_.size() < need) adj_.resize(need);
  adj_[key.lo.value].push_back({key.hi, length, scale});
  adj_[key.hi.value].push_back({key.lo, length, scale});
}

void LightSpanner::remove_l_edge(EdgeKey key) {
  edges_.erase(key);
  for (auto [a, b] : {std::pair{key.lo, key.hi}, std::pair{key.hi, key.lo}}) {
    auto& list = adj_[a.value];
    list.erase(std::find_if(list.begin(), list.end(),
                            [b](const Adjacent& e) { return e.to == b; }));
  }
}

void LightSpanner::set_membership(EdgeKey key, bool in_l, EdgeDelta* delta) {
  const bool present = edges_.contains(key);
  if (present == in_l) return;
  if (tracker_) tracker_->try_emplace(key, present);
  if (in_l) {
    const SpannerEdge* e = spanner_.find(key);
    if (!e) throw std::logic_error("light spanner edge must belong to S");
    add_l_edge(key, e->length, e->scale);
    if (delta) delta->added.push_back(key);
  } else {
    remove_l_edge(key);
    if (delta) delta->removed.push_back(key);
  }
}

void LightSpanner::bounded_search(PointId src, int scale, double cutoff,
                                  std::span<const PointId> targets,
                                  std::vector<double>& out) const {
  const std::size_t cap = space_->id_capacity();
  if (dist_.size() < cap) {
    dist_.resize(cap, kInf);
    stamp_.resize(cap, 0);
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  auto dist = [&](PointId p) { return stamp_[p.value] == epoch_ ? dist_[p.value] : kInf; };
  auto set = [&](PointId p, double d) {
    stamp_[p.value] = epoch_;
    dist_[p.value] = d;
  };
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  set(src, 0.0);
  heap.push({0.0, src.value});
  while (!heap.empty()) {
    const auto [d, at] = heap.top();
    heap.pop();
    if (d > cutoff) break;
    if (d > dist(PointId{at})) continue;
    if (at >= adj_.size()) continue;
    for (const Adjacent& e : adj_[at]) {
      if (e.scale >= scale) continue;
      ++relaxations_;
      const double nd = d + e.length;
      if (nd < dist(e.to) && nd <= cutoff) {
        set(e.to, nd);
        heap.push({nd, e.to.value});
      }
    }
  }
  out.clear();
  for (PointId t : targets) out.push_back(dist(t));
}

EdgeDelta LightSpanner::recompute(PointId x) {
  EdgeDelta delta;
  const double eps = options_.eps;
  const double cutoff_factor = std::max(2.0, 1.0 + eps);
  std::vector<PointId> targets;
  std::vector<double> found;
  for (int i = 0; i <= space_->max_scale(); ++i) {
    // d* of a scale-i edge only reads L edges of scale < i, so the edges of
    // one scale can share a search per source.
    const std::vector<EdgeKey> keys = spanner_.edges_at_scale_in_ball(i, x, 4.0 * pow2(i));
    for (std::size_t first = 0; first < keys.size();) {
      std::size_t last = first;
      double cutoff = 0.0;
      targets.clear();
      for (; last < keys.size() && keys[last].lo == keys[first].lo; ++last) {
        targets.push_back(keys[last].hi);
        cutoff = std::max(cutoff, cutoff_factor * spanner_.find(keys[last])->length);
      }
      bounded_search(keys[first].lo, i, cutoff, targets, found);
      for (std::size_t k = first; k < last; ++k) {
        const double length = spanner_.find(keys[k])->length;
        set_membership(keys[k], found[k - first] > (1.0 + eps) * length, &delta);
      }
      first = last;
    }
  }
  return delta;
}

EdgeDelta LightSpanner::recompute_fast(PointId x) {
  if (!small_) throw std::logic_error("recompute_fast requires fast mode");
  EdgeDelta delta;
  const double eps = options_.eps;
  for (int i = 0; i <= space_->max_scale(); ++i) {
    update_dist_estimates(x, i);
    for (EdgeKey key : spanner_.edges_at_scale_in_ball(i, x, 8.0 * pow2(i))) {
      const SpannerEdge* e = spanner_.find(key);
      const EstimateEntry* est = store_.dstar(key);
      if (!est) {
        throw std::logic_error("missing d* estimate for edge (" + to_string(key.lo) + ", " +
                               to_string(key.hi) + ")");
      }
      set_membership(key, est->value > (1.0 + eps) * e->length, &delta);
    }
  }
  return delta;
}

int LightSpanner::sketch_level(int scale) const {
  const double target = eps_small_ * pow2(scale);
  if (target < 1.0) return 0;
  return std::min(std::ilogb(target), net_.top_level());
}

LightSpanner::Sketch LightSpanner::build_sketch(PointId center, int scale,
                                                std::vector<PointId> extra) const {
  std::vector<PointId> vertices = net_.search(sketch_level(scale), center, 7.0 * pow2(scale));
  vertices.insert(vertices.end(), extra.begin(), extra.end());
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());

  Sketch sketch(std::move(vertices));
  sketch_vertices_ += sketch.size();
  const double lo_band = pow2(scale - 3);
  const double hi_band = pow2(scale - 1);
  for (std::size_t a = 0; a < sketch.size(); ++a) {
    for (std::size_t b = a + 1; b < sketch.size(); ++b) {
      const PointId p = sketch.vertex(a);
      const PointId q = sketch.vertex(b);
      const double d = space_->distance(p, q);
      if (d >= hi_band) continue;
      const EdgeKey key{p, q};
      if (d >= lo_band) {
        // L edges of scale i-1 and i-2 at their true length
        if (edges_.contains(key)) sketch.set_edge(a, b, d);
      } else if (small_->contains(p, q)) {
        // shorter pairs through the stored whole-L distance estimates
        const EstimateEntry* est = store_.dl(key);
        if (!est) {
          throw std::logic_error("missing dL estimate for pair (" + to_string(p) + ", " +
                                 to_string(q) + ")");
        }
        sketch.set_edge(a, b, est->value);
      }
    }
  }
  return sketch;
}

double LightSpanner::estimate(PointId u, PointId v, int scale, PointId center) const {
  if (!small_) throw std::logic_error("estimate requires fast mode");
  if (u == v) return 0.0;
  ++estimate_calls_;
  const Sketch sketch = build_sketch(center, scale, {u, v});
  return sketch.distance(u, v, relaxations_);
}

void LightSpanner::update_dist_estimates(PointId x, int scale) {
  if (!small_) throw std::logic_error("update_dist_estimates requires fast mode");
  const double radius = 4.0 * pow2(scale);
  std::vector<EdgeKey> short_pairs;
  if (scale - 2 >= 1) short_pairs = small_->edges_at_scale_in_ball(scale - 2, x, radius);
  const std::vector<EdgeKey> pairs = small_->edges_at_scale_in_ball(scale, x, radius);
  if (short_pairs.empty() && pairs.empty()) return;

  // H depends only on (x, scale): the dL entries written below have scale
  // i-2, while H reads dL entries of scale <= i-3 only.
  std::vector<PointId> endpoints;
  for (const std::vector<EdgeKey>* list : std::initializer_list<const std::vector<EdgeKey>*>{&short_pairs, &pairs}) {
    for (EdgeKey key : *list) {
      endpoints.push_back(key.lo);
      endpoints.push_back(key.hi);
    }
  }
  const Sketch sketch = build_sketch(x, scale, std::move(endpoints));
  const double alpha = estimate_alpha(scale);
  auto write = [&](const std::vector<EdgeKey>& keys, bool is_dl) {
    std::vector<PointId> targets;
    for (std::size_t first = 0; first < keys.size();) {
      std::size_t last = first;
      targets.clear();
      for (; last < keys.size() && keys[last].lo == keys[first].lo; ++last) {
        targets.push_back(keys[last].hi);
      }
      const auto found = sketch.distances(keys[first].lo, targets, relaxations_);
      for (std::size_t k = first; k < last; ++k) {
        ++estimate_calls_;
        const EstimateEntry entry{found[k - first], alpha};
        if (is_dl) {
          store_.set_dl(keys[k], entry);
        } else {
          store_.set_dstar(keys[k], entry);
        }
      }
      first = last;
    }
  };
  write(short_pairs, true);
  write(pairs, false);
}

bool LightSpanner::contains(PointId u, PointId v) const {
  return u != v && edges_.contains(EdgeKey{u, v});
}

double LightSpanner::total_weight() const {
  double w = 0.0;
  for (const SpannerEdge& e : edges()) w += e.length;
  return w;
}

double LightSpanner::lightness() const {
  if (net_.size() < 2) throw std::logic_error("lightness needs at least two points");
  if (edges_.empty()) throw std::logic_error("lightness undefined: light spanner is empty");
  const auto& points = net_.members(0);
  return total_weight() / oracle::mst_weight(*space_, points);
}

std::vector<EdgeKey> LightSpanner::bucket(int scale) const {
  std::vector<EdgeKey> out;
  for (const auto& [key, e] : edges_) {
    if (e.scale == scale) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SpannerEdge> LightSpanner::edges() const {
  std::vector<SpannerEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, e] : edges_) {
    out.push_back(SpannerEdge{key.lo, key.hi, e.length, e.scale, 0, 0});
  }
  std::sort(out.begin(), out.end(),
            [](const SpannerEdge& a, const SpannerEdge& b) { return a.key() < b.key(); });
  return out;
}

std::vector<EdgeKey> LightSpanner::missing_estimates() const {
  std::vector<EdgeKey> out;
  if (!small_) return out;
  const int dl_max_scale = space_->max_scale() - 2;
  for (const SpannerEdge& e : small_->edges()) {
    if (!store_.dstar(e.key()) || (e.scale <= dl_max_scale && !store_.dl(e.key()))) {
      out.push_back(e.key());
    }
  }
  return out;
}

std::string LightSpanner::dump_edges() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const SpannerEdge& e : edges()) {
    out << e.u.value << ' ' << e.v.value << ' ' << e.length << ' ' << e.scale << '\n';
  }
  return out.str();
}

std::string LightSpanner::dump_estimates() const {
  std::ostringstream out;
  out << std::setprecision(17);
  if (!small_) return out.str();
  for (const SpannerEdge& e : small_->edges()) {
    out << e.u.value << ' ' << e.v.value << ' ' << e.scale << ' ';
    if (const EstimateEntry* ds = store_.dstar(e.key())) {
      out << ds->value;
    } else {
      out << '-';
    }
    out << ' ';
    if (const EstimateEntry* dl = store_.dl(e.key())) {
      out << dl->value;
    } else {
      out << '-';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dynspanner
