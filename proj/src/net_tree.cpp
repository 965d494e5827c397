#include "dynspanner/net_tree.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dynspanner {

namespace {

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

void sort_unique(std::vector<PointId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

NetHierarchy::NetHierarchy(const MetricSpace& space, double radius_factor)
    : space_(&space),
      radius_factor_(radius_factor),
      top_level_(space.log2_phi()),
      levels_(static_cast<std::size_t>(space.log2_phi()) + 1) {
  if (!(radius_factor >= 2.0)) {
    throw std::invalid_argument("NetHierarchy: radius factor must be >= 2");
  }
}

NetHierarchy NetHierarchy::from_levels(const MetricSpace& space, double radius_factor,
                                       const std::vector<std::vector<PointId>>& levels) {
  NetHierarchy net(space, radius_factor);
  if (levels.size() > net.levels_.size()) {
    throw std::invalid_argument("from_levels: more levels than log2(phi) + 1");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int level = static_cast<int>(i);
    for (PointId p : levels[i]) {
      if (!space.contains(p)) throw std::out_of_range("from_levels: unknown point");
      if (net.top_of(p) != level - 1) {
        throw std::invalid_argument("from_levels: point " + to_string(p) +
                                    " missing from a lower level or listed twice");
      }
      net.join_level(p, level, net.scan_level(p, level));
    }
  }
  return net;
}

double NetHierarchy::neighbor_radius(int level) const {
  return radius_factor_ * pow2(level);
}

void NetHierarchy::check_level(int level) const {
  if (level < 0 || level > top_level_) {
    throw std::out_of_range("net level " + std::to_string(level) + " outside [0, " +
                            std::to_string(top_level_) + "]");
  }
}

bool NetHierarchy::contains(PointId p) const { return top_of(p) >= 0; }

int NetHierarchy::top_of(PointId p) const {
  return p.value < top_.size() ? top_[p.value] : -1;
}

const std::vector<PointId>& NetHierarchy::members(int level) const {
  check_level(level);
  return levels_[level];
}

std::vector<PointId> NetHierarchy::sorted_members(int level) const {
  auto out = members(level);
  std::sort(out.begin(), out.end());
  return out;
}

std::span<const Neighbor> NetHierarchy::neighbors(PointId p, int level) const {
  check_level(level);
  if (!in_level(p, level)) {
    throw std::invalid_argument("point " + to_string(p) + " is not in level " +
                                std::to_string(level));
  }
  return nbrs_[p.value][level];
}

void NetHierarchy::ensure_capacity(PointId p) {
  if (p.value >= top_.size()) {
    top_.resize(p.value + 1, -1);
    nbrs_.resize(p.value + 1);
  }
}

void NetHierarchy::join_level(PointId p, int level, std::vector<Neighbor> nbrs) {
  ensure_capacity(p);
  levels_[level].push_back(p);
  top_[p.value] = level;
  for (const Neighbor& nb : nbrs) {
    auto& list = nbrs_[nb.id.value][level];
    const Neighbor entry{nb.dist, p};
    list.insert(std::lower_bound(list.begin(), list.end(), entry, neighbor_less), entry);
  }
  nbrs_[p.value].resize(level + 1);
  nbrs_[p.value][level] = std::move(nbrs);
}

void NetHierarchy::leave_level(PointId p, int level) {
  for (const Neighbor& nb : nbrs_[p.value][level]) {
    auto& list = nbrs_[nb.id.value][level];
    const Neighbor probe{nb.dist, p};
    auto it = std::lower_bound(list.begin(), list.end(), probe, neighbor_less);
    if (it == list.end() || it->id != p) {
      it = std::find_if(list.begin(), list.end(),
                        [p](const Neighbor& n) { return n.id == p; });
    }
    if (it != list.end()) list.erase(it);
  }
  auto& members = levels_[level];
  auto it = std::find(members.begin(), members.end(), p);
  *it = members.back();
  members.pop_back();
  nbrs_[p.value].pop_back();
  top_[p.value] = level - 1;
}

std::vector<Neighbor> NetHierarchy::scan_level(PointId p, int level) const {
  const double radius = neighbor_radius(level);
  std::vector<Neighbor> out;
  for (PointId q : levels_[level]) {
    if (q == p) continue;
    const double d = space_->distance(p, q);
    if (d <= radius) out.push_back({d, q});
  }
  std::sort(out.begin(), out.end(), neighbor_less);
  return out;
}

std::vector<Neighbor> NetHierarchy::neighbors_by_ball(PointId p, int level) const {
  std::vector<Neighbor> out;
  for (PointId q : descend(level, p, neighbor_radius(level))) {
    if (q != p) out.push_back({space_->distance(p, q), q});
  }
  std::sort(out.begin(), out.end(), neighbor_less);
  return out;
}

bool NetHierarchy::covered_at(PointId y, int level) const {
  const double cover = pow2(level);
  for (const Neighbor& nb : nbrs_[y.value][level - 1]) {
    if (nb.dist > cover) break;
    if (top_[nb.id.value] >= level) return true;
  }
  return false;
}

std::vector<PointId> NetHierarchy::descend(int level, PointId center, double r) const {
  // Candidates at level j are N_j ∩ B(center, rho_j) with
  // rho_j = r + 2^{level+1} + ... + 2^j; every N_{j-1} point within rho_{j-1}
  // has a level-j cover within 2^j, found through that cover's level-(j-1) list.
  auto rho = [&](int j) { return r + pow2(j + 1) - pow2(level + 1); };
  std::vector<PointId> current;
  for (PointId p : levels_[top_level_]) {
    if (space_->distance(center, p) <= rho(top_level_)) current.push_back(p);
  }
  for (int j = top_level_; j > level; --j) {
    const double reach = pow2(j);
    const double keep = rho(j - 1);
    std::vector<PointId> next;
    for (PointId p : current) {
      if (space_->distance(center, p) <= keep) next.push_back(p);
      for (const Neighbor& nb : nbrs_[p.value][j - 1]) {
        if (nb.dist > reach) break;
        if (space_->distance(center, nb.id) <= keep) next.push_back(nb.id);
      }
    }
    sort_unique(next);
    current = std::move(next);
  }
  return current;
}

std::vector<PointId> NetHierarchy::ball(int level, PointId center, double r) const {
  check_level(level);
  if (r > neighbor_radius(level)) {
    throw std::invalid_argument("ball: radius exceeds maintained neighbor radius at level " +
                                std::to_string(level));
  }
  return search(level, center, r);
}

std::vector<PointId> NetHierarchy::search(int level, PointId center, double r) const {
  check_level(level);
  if (!(r >= 0.0)) throw std::invalid_argument("ball: negative radius");
  ++ball_queries_;
  if (!in_level(center, level) || r > neighbor_radius(level)) {
    return descend(level, center, r);
  }
  std::vector<PointId> out{center};
  for (const Neighbor& nb : nbrs_[center.value][level]) {
    if (nb.dist > r) break;
    out.push_back(nb.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

NetChangeset NetHierarchy::insert_point(PointId x) {
  if (!space_->is_active(x)) {
    throw std::invalid_argument("insert_point: point " + to_string(x) + " is not active");
  }
  if (contains(x)) {
    throw std::invalid_argument("insert_point: point " + to_string(x) + " already present");
  }
  // x always joins N_0 = X; i0 is the first level whose net is within 2^i0.
  int i0 = top_level_ + 1;
  for (int i = 1; i <= top_level_; ++i) {
    const double cover = pow2(i);
    bool found = false;
    for (PointId p : ball(i, x, cover)) {
      if (space_->distance(x, p) < cover) {
        found = true;
        break;
      }
    }
    if (found) {
      i0 = i;
      break;
    }
  }
  std::vector<std::vector<Neighbor>> lists;
  for (int i = 0; i < i0; ++i) lists.push_back(neighbors_by_ball(x, i));
  NetChangeset changes;
  for (int i = 0; i < i0; ++i) {
    join_level(x, i, std::move(lists[i]));
    changes.push_back({i, x, true});
  }
  return changes;
}

NetChangeset NetHierarchy::delete_point(PointId x) {
  if (!contains(x)) {
    throw std::invalid_argument("delete_point: point " + to_string(x) + " not present");
  }
  const int old_top = top_of(x);
  std::vector<std::vector<Neighbor>> old_lists = nbrs_[x.value];
  NetChangeset changes;
  for (int i = old_top; i >= 0; --i) leave_level(x, i);
  for (int i = 0; i <= old_top; ++i) changes.push_back({i, x, false});

  std::vector<std::vector<PointId>> promoted(static_cast<std::size_t>(top_level_) + 1);
  for (int i = 1; i <= top_level_; ++i) {
    if (i - 1 > old_top && promoted[i - 1].empty()) break;
    std::vector<PointId> candidates = promoted[i - 1];
    if (i - 1 <= old_top) {
      for (const Neighbor& nb : old_lists[i - 1]) {
        if (nb.dist > pow2(i)) break;
        candidates.push_back(nb.id);
      }
    }
    sort_unique(candidates);
    for (PointId y : candidates) {
      if (top_of(y) != i - 1 || covered_at(y, i)) continue;
      join_level(y, i, scan_level(y, i));
      promoted[i].push_back(y);
      changes.push_back({i, y, true});
    }
  }
  return changes;
}

std::string NetHierarchy::dump() const {
  std::ostringstream out;
  for (int i = 0; i <= top_level_; ++i) {
    out << i << ':';
    for (PointId p : sorted_members(i)) out << ' ' << p.value;
    out << '\n';
  }
  return out.str();
}

}  // namespace dynspanner
