#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dynspanner {

// Opaque point identifier. Ids are never recycled: a deleted point keeps its
// coordinates so distances to it stay defined.
struct PointId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(PointId, PointId) = default;
};

// Unordered pair of distinct points, stored with lo < hi.
struct EdgeKey {
  PointId lo;
  PointId hi;

  EdgeKey() = default;
  EdgeKey(PointId a, PointId b) : lo(a < b ? a : b), hi(a < b ? b : a) {}

  std::uint64_t packed() const {
    return (std::uint64_t{lo.value} << 32) | hi.value;
  }

  friend constexpr auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

}  // namespace dynspanner

template <>
struct std::hash<dynspanner::PointId> {
  std::size_t operator()(dynspanner::PointId p) const noexcept {
    return std::hash<std::uint32_t>{}(p.value);
  }
};

template <>
struct std::hash<dynspanner::EdgeKey> {
  std::size_t operator()(const dynspanner::EdgeKey& e) const noexcept {
    // splitmix64 finalizer; packed keys are highly structured
    std::uint64_t z = e.packed() + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

namespace dynspanner {

// Scale of a pair: the unique i with 2^{i-1} <= d < 2^i.
int scale_of(double d);

// 2^i as a double, for any integer i.
double pow2(int i);

// Point store plus the distance function. Two backends: Euclidean R^d
// coordinates, or an explicit symmetric distance matrix over ids 0..m-1.
class MetricSpace {
 public:
  MetricSpace(std::size_t dim, double phi);

  static MetricSpace from_distance_matrix(std::vector<std::vector<double>> matrix,
                                          double phi);

  // Next unused id.
  PointId add_point(std::span<const double> coords);
  // Caller-chosen id; must not have been used before.
  PointId add_point(PointId id, std::span<const double> coords);

  bool contains(PointId p) const;
  std::span<const double> coords(PointId p) const;
  double distance(PointId u, PointId v) const;

  void activate(PointId p);
  void deactivate(PointId p);
  bool is_active(PointId p) const;
  std::size_t active_count() const { return active_count_; }
  // Sorted ascending.
  std::vector<PointId> active_points() const;

  std::size_t dim() const { return dim_; }
  double phi() const { return phi_; }
  int log2_phi() const { return log2_phi_; }
  // Largest scale a (1, Phi)-bounded pair can have: a pair at distance
  // exactly Phi has scale log2(Phi) + 1.
  int max_scale() const { return log2_phi_ + 1; }
  // One past the largest id ever stored; sizes id-indexed arrays.
  std::size_t id_capacity() const { return known_.size(); }
  bool is_matrix_backed() const { return !matrix_.empty(); }

 private:
  void check_known(PointId p) const;

  std::size_t dim_;
  double phi_;
  int log2_phi_;
  std::vector<double> coords_;
  std::vector<std::uint8_t> known_;
  std::vector<std::uint8_t> active_;
  std::size_t active_count_ = 0;
  std::vector<std::vector<double>> matrix_;
};

struct BoundednessViolation {
  PointId u;
  PointId v;
  double distance;
};

struct BoundednessReport {
  bool ok = true;
  std::vector<BoundednessViolation> violations;
};

// Checks 1 <= d(u,v) <= Phi over every active pair. O(n^2).
BoundednessReport validate_bounded(const MetricSpace& space);

struct PointRecord {
  PointId id;
  std::vector<double> coords;
};

// Reads `id x1 ... xd` lines. Blank lines and lines starting with '#' are
// skipped; every line must carry the same dimension.
std::vector<PointRecord> read_point_file(std::istream& in);

std::string to_string(PointId p);

}  // namespace dynspanner
