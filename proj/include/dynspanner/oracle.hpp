#pragma once

#include <span>
#include <string>
#include <vector>

#include "dynspanner/light_spanner.hpp"
#include "dynspanner/metric.hpp"
#include "dynspanner/net_spanner.hpp"
#include "dynspanner/net_tree.hpp"

// Brute-force ground truth. Everything here is quadratic or worse and works
// on snapshots; none of it is consulted by the maintained structure.
namespace dynspanner::oracle {

// Relative slack applied when comparing recomputed distances against
// thresholds, absorbing summation-order differences.
inline constexpr double kTolerance = 1e-9;

struct WeightedEdge {
  PointId u;
  PointId v;
  double w;
};

std::vector<WeightedEdge> weighted(std::span<const SpannerEdge> edges);

// Dijkstra; +inf when disconnected.
double graph_distance(std::span<const WeightedEdge> edges, PointId u, PointId v);

// All-pairs distances over vertices 0..n-1.
std::vector<std::vector<double>> floyd_warshall(std::size_t n,
                                                std::span<const WeightedEdge> edges);

// Distance between u and v over L edges of scale strictly below scale(u,v).
double dstar(const MetricSpace& space, std::span<const SpannerEdge> light, PointId u,
             PointId v);

enum class Invariant { stretch, lightness, subset };

struct Violation {
  EdgeKey edge;
  Invariant which;
  double dstar;
  double threshold;
};

struct ViolationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks both delayed-greedy invariants on every S edge, and L ⊆ S.
ViolationReport check_invariants(const MetricSpace& space,
                                 std::span<const SpannerEdge> net_spanner,
                                 std::span<const SpannerEdge> light, double eps);

// Prim over the complete graph on the given points (default: active points).
double mst_weight(const MetricSpace& space);
double mst_weight(const MetricSpace& space, std::span<const PointId> points);
double mst_weight_kruskal(const MetricSpace& space, std::span<const PointId> points);

// Max over active pairs of d_L(u,v) / d(u,v); +inf when L is disconnected.
double max_stretch(const MetricSpace& space, std::span<const SpannerEdge> light);

struct NetValidation {
  bool ok = true;
  std::vector<std::string> problems;
};

// N_0 equals the active set, nesting, packing (pairwise >= 2^i for i >= 1)
// and covering (each N_{i-1} point within 2^i of N_i).
NetValidation validate_net_hierarchy(const NetHierarchy& net, const MetricSpace& space);

// Every change at level i lies within 2^i of the updated point, and a
// deletion removes nothing but the deleted point.
NetValidation check_net_locality(const MetricSpace& space, const NetChangeset& changes,
                                 PointId updated, OpKind op);

// Definitional edge set for the eps-net-tree spanner of `net`.
std::vector<EdgeKey> net_spanner_edges(const NetHierarchy& net, double eps);

bool is_coarse_approx(double estimate, double exact, double base, double alpha);

// Offline greedy t-spanner; ties broken by (length, min id, max id).
std::vector<WeightedEdge> greedy_spanner_reference(std::span<const WeightedEdge> edges,
                                                   double t);

struct EstimateFailure {
  EdgeKey edge;
  bool is_dstar;
  double stored;
  double exact;
  double alpha;
};

struct EstimateSweep {
  std::vector<EstimateFailure> failures;
  std::size_t dstar_checked = 0;
  std::size_t dl_checked = 0;
  bool ok() const { return failures.empty(); }
};

// Stored d* estimates must be coarse approximations of the exact d*; stored
// dL estimates plain approximations of the exact distance in L.
EstimateSweep check_estimates(const MetricSpace& space, std::span<const SpannerEdge> light,
                              const EstimateStore& store);

// Local-distance stability across one update: for sampled scale-i S edges
// with an endpoint outside B(x, 4 * 2^i), d over L edges of scale < i is
// unchanged or exceeds 2 d(u,v) both before and after.
std::vector<EdgeKey> check_distance_stability(const MetricSpace& space,
                                              std::span<const SpannerEdge> net_spanner,
                                              std::span<const SpannerEdge> light_before,
                                              std::span<const SpannerEdge> light_after,
                                              PointId updated);

}  // namespace dynspanner::oracle
