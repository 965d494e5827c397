#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "dynspanner/metric.hpp"
#include "dynspanner/net_tree.hpp"

namespace dynspanner {

struct SpannerEdge {
  PointId u;  // u < v
  PointId v;
  double length;
  int scale;
  // Net levels whose edge rule admits the pair: every level in
  // [witness_lo, witness_hi] holds both endpoints with length <= c * 2^level.
  int witness_lo = 0;
  int witness_hi = 0;

  EdgeKey key() const { return {u, v}; }
};

struct EdgeDelta {
  std::vector<EdgeKey> added;
  std::vector<EdgeKey> removed;

  bool empty() const { return added.empty() && removed.empty(); }
};

// Separation constant of the eps-net-tree spanner: c = 4 + 16 / eps.
double spanner_constant(double eps);

// Edge set {(u,v) : exists i with u,v in N_i and d(u,v) <= c * 2^i} over a
// shared NetHierarchy. Because nets are nested, a pair is an edge exactly
// when d(u,v) <= c * 2^h with h the lower of the two endpoints' top levels,
// so an update only touches edges incident to points whose top level moved.
class NetSpanner {
 public:
  NetSpanner(const NetHierarchy& net, double eps);

  // Brings the edge set in line with the hierarchy after the update that
  // produced `changes`.
  EdgeDelta sync(const NetChangeset& changes);

  bool contains(PointId u, PointId v) const;
  const SpannerEdge* find(EdgeKey key) const;

  // Edges of the given scale with both endpoints within r of x.
  std::vector<EdgeKey> edges_at_scale_in_ball(int scale, PointId x, double r) const;

  double eps() const { return eps_; }
  double c() const { return c_; }
  std::size_t edge_count() const { return edges_.size(); }
  double total_weight() const;
  std::size_t degree(PointId p) const;
  std::size_t max_degree() const;

  // Sorted by (u, v).
  std::vector<SpannerEdge> edges() const;
  // `u v length scale` per line, sorted.
  std::string dump() const;

 private:
  struct Incidence {
    // by_scale[s] lists neighbors joined by a scale-s edge
    std::vector<std::vector<PointId>> by_scale;
    std::size_t degree = 0;
  };

  std::vector<SpannerEdge> desired_incident(PointId p) const;
  void add_edge(const SpannerEdge& e);
  void remove_edge(EdgeKey key);
  Incidence& incidence(PointId p);
  int lowest_witness_level(double length) const;

  const NetHierarchy* net_;
  double eps_;
  double c_;
  std::unordered_map<EdgeKey, SpannerEdge> edges_;
  std::vector<Incidence> incidence_;
};

}  // namespace dynspanner
