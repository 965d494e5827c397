#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynspanner/metric.hpp"
#include "dynspanner/net_spanner.hpp"
#include "dynspanner/net_tree.hpp"

namespace dynspanner {

enum class Mode { exact, fast };
enum class OpKind { insert, remove };

std::string to_string(Mode mode);
std::string to_string(OpKind op);

struct LightSpannerOptions {
  double eps = 0.5;
  Mode mode = Mode::exact;
  // Distortion budget constant for the estimate store (must be >= 1024/3).
  int kappa = 342;
  // Fault injection for oracle self-tests: updates leave L untouched apart
  // from dropping edges that left S.
  bool skip_recompute = false;
};

// eps / (3 * kappa * log2(phi))
double small_eps(double eps, int kappa, int log2_phi);

struct UpdateCounters {
  std::uint64_t ball_queries = 0;
  std::uint64_t dijkstra_relaxations = 0;
  std::uint64_t estimate_calls = 0;
  std::uint64_t sketch_vertices = 0;
};

struct UpdateReport {
  OpKind op = OpKind::insert;
  PointId id;
  std::vector<EdgeKey> added;
  std::vector<EdgeKey> removed;
  std::size_t recourse = 0;
  std::int64_t time_ns = 0;
  UpdateCounters counters;
  NetChangeset net_changes;
};

struct EstimateEntry {
  double value;
  // approximation factor promised when the value was written
  double alpha;
};

// Per S_small edge: a coarse estimate of d*(u,v), and for edges of scale
// <= max_scale - 2 an estimate of the distance in the whole light spanner.
class EstimateStore {
 public:
  void set_dstar(EdgeKey key, EstimateEntry entry) { dstar_[key] = entry; }
  void set_dl(EdgeKey key, EstimateEntry entry) { dl_[key] = entry; }
  const EstimateEntry* dstar(EdgeKey key) const;
  const EstimateEntry* dl(EdgeKey key) const;
  void erase(EdgeKey key);

  const std::unordered_map<EdgeKey, EstimateEntry>& dstar_entries() const { return dstar_; }
  const std::unordered_map<EdgeKey, EstimateEntry>& dl_entries() const { return dl_; }

 private:
  std::unordered_map<EdgeKey, EstimateEntry> dstar_;
  std::unordered_map<EdgeKey, EstimateEntry> dl_;
};

// Dynamic delayed greedy spanner L ⊆ S. For every scale-i edge (u,v) of S,
// with d* the distance over L edges of scale < i:
//   (u,v) not in L  =>  d*(u,v) <= (1 + eps) d(u,v)
//   (u,v) in L      =>  d*(u,v) >  (1 + eps/3) d(u,v)
// Exact mode computes d* by bounded Dijkstra. Fast mode keeps an
// eps_small-net-tree spanner S_small over the same hierarchy and reads d*
// from the estimate store, refreshed scale by scale around each update.
class LightSpanner {
 public:
  LightSpanner(const MetricSpace& space, LightSpannerOptions options);

  // x must be active in the space and not yet inserted.
  UpdateReport insert(PointId x);
  UpdateReport remove(PointId x);

  EdgeDelta recompute(PointId x);
  EdgeDelta recompute_fast(PointId x);
  void update_dist_estimates(PointId x, int scale);
  // Sketch-graph estimate of the distance between u and v over L edges of
  // scale < `scale`, built around the update center.
  double estimate(PointId u, PointId v, int scale, PointId center) const;

  bool contains(PointId u, PointId v) const;
  bool contains_point(PointId p) const { return net_.contains(p); }
  std::size_t point_count() const { return net_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  double total_weight() const;
  // total_weight / MST weight; needs >= 2 points and a nonempty L.
  double lightness() const;
  // Edges of L with exactly this scale, sorted.
  std::vector<EdgeKey> bucket(int scale) const;

  // Snapshot of L sorted by (u, v).
  std::vector<SpannerEdge> edges() const;
  // Edges of S_small lacking a required estimate; always empty unless the
  // store bookkeeping is broken.
  std::vector<EdgeKey> missing_estimates() const;

  // `u v length scale` per line, sorted.
  std::string dump_edges() const;
  // `u v scale dstar dL` per line over the S_small edges, sorted; `-` marks
  // an absent dL entry.
  std::string dump_estimates() const;

  const MetricSpace& space() const { return *space_; }
  const NetHierarchy& net() const { return net_; }
  const NetSpanner& spanner() const { return spanner_; }
  const NetSpanner* small_spanner() const { return small_ ? &*small_ : nullptr; }
  const EstimateStore& estimates() const { return store_; }
  const LightSpannerOptions& options() const { return options_; }
  double eps_small() const { return eps_small_; }
  // Approximation factor 1 + kappa * i * eps_small for scale i.
  double estimate_alpha(int scale) const;

 private:
  struct Adjacent {
    PointId to;
    double length;
    int scale;
  };
  struct LEdge {
    double length;
    int scale;
  };
  using Tracker = std::unordered_map<EdgeKey, bool>;

  class Sketch;

  UpdateReport apply(OpKind op, PointId x);
  void set_membership(EdgeKey key, bool in_l, EdgeDelta* delta);
  void add_l_edge(EdgeKey key, double length, int scale);
  void remove_l_edge(EdgeKey key);
  // Dijkstra from src over L edges of scale < `scale`, pruned at cutoff;
  // out[k] is the distance to targets[k], +inf beyond the cutoff.
  void bounded_search(PointId src, int scale, double cutoff, std::span<const PointId> targets,
                      std::vector<double>& out) const;
  Sketch build_sketch(PointId center, int scale, std::vector<PointId> extra) const;
  int sketch_level(int scale) const;

  const MetricSpace* space_;
  LightSpannerOptions options_;
  double eps_small_;
  NetHierarchy net_;
  NetSpanner spanner_;
  std::optional<NetSpanner> small_;
  EstimateStore store_;

  std::unordered_map<EdgeKey, LEdge> edges_;
  std::vector<std::vector<Adjacent>> adj_;
  Tracker* tracker_ = nullptr;

  // Dijkstra scratch, indexed by point id
  mutable std::vector<double> dist_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
  mutable std::uint64_t relaxations_ = 0;
  mutable std::uint64_t estimate_calls_ = 0;
  mutable std::uint64_t sketch_vertices_ = 0;
};

}  // namespace dynspanner
