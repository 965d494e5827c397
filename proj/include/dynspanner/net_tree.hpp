#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynspanner/metric.hpp"

namespace dynspanner {

struct NetChange {
  int level;
  PointId point;
  bool added;

  friend bool operator==(const NetChange&, const NetChange&) = default;
};

using NetChangeset = std::vector<NetChange>;

struct Neighbor {
  double dist;
  PointId id;
};

// Nested nets N_0 ⊇ N_1 ⊇ ... ⊇ N_top over the active points, top = log2(Phi).
// N_0 is the whole point set, and for i >= 1 N_i is a 2^i-net of N_{i-1}.
//
// Every member of N_i keeps the list of other N_i members within
// R_i = radius_factor * 2^i, sorted by distance. Ball queries around
// non-members walk down from the top level through these lists, so no
// level is ever scanned in full except the (tiny) top one.
class NetHierarchy {
 public:
  // radius_factor must be >= 2 so a level-(i-1) list reaches the 2^i cover
  // radius used by the descent.
  NetHierarchy(const MetricSpace& space, double radius_factor);

  // Builds a hierarchy from explicit level sets (level 0 first). No validity
  // check is made; use the oracle for that.
  static NetHierarchy from_levels(const MetricSpace& space, double radius_factor,
                                  const std::vector<std::vector<PointId>>& levels);

  NetChangeset insert_point(PointId x);
  NetChangeset delete_point(PointId x);

  // Members of N_level within distance r of center. center only needs
  // coordinates; it may be absent from the hierarchy or deleted.
  // Requires r <= neighbor_radius(level).
  std::vector<PointId> ball(int level, PointId center, double r) const;
  // Same result for any radius; answered from the center's own list when it
  // reaches far enough, otherwise by the top-down walk.
  std::vector<PointId> search(int level, PointId center, double r) const;

  int top_level() const { return top_level_; }
  double radius_factor() const { return radius_factor_; }
  double neighbor_radius(int level) const;

  bool contains(PointId p) const;
  // Highest level holding p, or -1 when absent.
  int top_of(PointId p) const;
  bool in_level(PointId p, int level) const { return top_of(p) >= level; }
  std::size_t size() const { return levels_.empty() ? 0 : levels_[0].size(); }

  // Unordered.
  const std::vector<PointId>& members(int level) const;
  std::vector<PointId> sorted_members(int level) const;
  std::span<const Neighbor> neighbors(PointId p, int level) const;

  // One line per level: `level: id id ...`, ids ascending.
  std::string dump() const;

  const MetricSpace& space() const { return *space_; }
  std::uint64_t ball_queries() const { return ball_queries_; }

 private:
  void check_level(int level) const;
  void ensure_capacity(PointId p);
  // Adds p to N_level with the given neighbor list; updates the neighbors'
  // lists symmetrically.
  void join_level(PointId p, int level, std::vector<Neighbor> nbrs);
  void leave_level(PointId p, int level);
  std::vector<Neighbor> scan_level(PointId p, int level) const;
  std::vector<Neighbor> neighbors_by_ball(PointId p, int level) const;
  bool covered_at(PointId y, int level) const;
  std::vector<PointId> descend(int level, PointId center, double r) const;

  const MetricSpace* space_;
  double radius_factor_;
  int top_level_;
  std::vector<std::vector<PointId>> levels_;
  std::vector<int> top_;
  // nbrs_[id][level], sorted by (dist, id)
  std::vector<std::vector<std::vector<Neighbor>>> nbrs_;
  mutable std::uint64_t ball_queries_ = 0;
};

}  // namespace dynspanner
