#include "dynspanner/net_spanner.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dynspanner {

double spanner_constant(double eps) { return 4.0 + 16.0 / eps; }

NetSpanner::NetSpanner(const NetHierarchy& net, double eps)
    : net_(&net), eps_(eps), c_(spanner_constant(eps)) {
  if (!(eps > 0.0)) throw std::invalid_argument("NetSpanner: eps must be positive");
  if (c_ > net.radius_factor()) {
    throw std::invalid_argument(
        "NetSpanner: spanner radius exceeds the hierarchy's neighbor radius");
  }
}

int NetSpanner::lowest_witness_level(double length) const {
  int level = 0;
  while (c_ * pow2(level) < length) ++level;
  return level;
}

NetSpanner::Incidence& NetSpanner::incidence(PointId p) {
  if (p.value >= incidence_.size()) incidence_.resize(p.value + 1);
  return incidence_[p.value];
}

bool NetSpanner::contains(PointId u, PointId v) const {
  if (u == v) return false;
  return edges_.contains(EdgeKey{u, v});
}

const SpannerEdge* NetSpanner::find(EdgeKey key) const {
  auto it = edges_.find(key);
  return it == edges_.end() ? nullptr : &it->second;
}

std::vector<SpannerEdge> NetSpanner::desired_incident(PointId p) const {
  const MetricSpace& space = net_->space();
  const int top_p = net_->top_of(p);
  std::vector<SpannerEdge> out;
  std::vector<PointId> seen;
  for (int level = 0; level <= top_p; ++level) {
    for (PointId q : net_->ball(level, p, c_ * pow2(level))) {
      if (q != p) seen.push_back(q);
    }
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (PointId q : seen) {
    const double len = space.distance(p, q);
    SpannerEdge e{std::min(p, q), std::max(p, q), len, scale_of(len), 0, 0};
    e.witness_lo = lowest_witness_level(len);
    e.witness_hi = std::min(top_p, net_->top_of(q));
    out.push_back(e);
  }
  return out;
}

void NetSpanner::add_edge(const SpannerEdge& e) {
  edges_.emplace(e.key(), e);
  for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
    Incidence& inc = incidence(a);
    if (inc.by_scale.size() <= static_cast<std::size_t>(e.scale)) {
      inc.by_scale.resize(e.scale + 1);
    }
    inc.by_scale[e.scale].push_back(b);
    ++inc.degree;
  }
}

void NetSpanner::remove_edge(EdgeKey key) {
  auto it = edges_.find(key);
  const int scale = it->second.scale;
  for (auto [a, b] : {std::pair{key.lo, key.hi}, std::pair{key.hi, key.lo}}) {
    Incidence& inc = incidence(a);
    auto& list = inc.by_scale[scale];
    list.erase(std::find(list.begin(), list.end(), b));
    --inc.degree;
  }
  edges_.erase(it);
}

EdgeDelta NetSpanner::sync(const NetChangeset& changes) {
  std::vector<PointId> touched;
  for (const NetChange& ch : changes) {
    if (ch.level < 0 || ch.level > net_->top_level()) {
      throw std::out_of_range("sync: change references unknown level " +
                              std::to_string(ch.level));
    }
    touched.push_back(ch.point);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  EdgeDelta delta;
  for (PointId p : touched) {
    std::vector<SpannerEdge> want;
    if (net_->contains(p)) want = desired_incident(p);
    std::vector<PointId> have;
    if (p.value < incidence_.size()) {
      for (const auto& list : incidence_[p.value].by_scale) {
        have.insert(have.end(), list.begin(), list.end());
      }
    }
    std::sort(have.begin(), have.end());
    std::vector<PointId> wanted_ids;
    for (const SpannerEdge& e : want) wanted_ids.push_back(e.u == p ? e.v : e.u);
    // `want` is sorted by the other endpoint already
    for (PointId q : have) {
      if (!std::binary_search(wanted_ids.begin(), wanted_ids.end(), q)) {
        remove_edge(EdgeKey{p, q});
        delta.removed.push_back(EdgeKey{p, q});
      }
    }
    for (const SpannerEdge& e : want) {
      auto it = edges_.find(e.key());
      if (it == edges_.end()) {
        add_edge(e);
        delta.added.push_back(e.key());
      } else {
        it->second.witness_lo = e.witness_lo;
        it->second.witness_hi = e.witness_hi;
      }
    }
  }
  return delta;
}

std::vector<EdgeKey> NetSpanner::edges_at_scale_in_ball(int scale, PointId x,
                                                        double r) const {
  std::vector<EdgeKey> out;
  const int lowest = std::min(lowest_witness_level(pow2(scale - 1)), net_->top_level());
  const MetricSpace& space = net_->space();
  for (PointId u : net_->search(lowest, x, r)) {
    if (u.value >= incidence_.size()) continue;
    const auto& by_scale = incidence_[u.value].by_scale;
    if (by_scale.size() <= static_cast<std::size_t>(scale)) continue;
    for (PointId v : by_scale[scale]) {
      if (u < v && space.distance(x, v) <= r) out.push_back(EdgeKey{u, v});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double NetSpanner::total_weight() const {
  double w = 0.0;
  for (const auto& [key, e] : edges_) w += e.length;
  return w;
}

std::size_t NetSpanner::degree(PointId p) const {
  return p.value < incidence_.size() ? incidence_[p.value].degree : 0;
}

std::size_t NetSpanner::max_degree() const {
  std::size_t best = 0;
  for (const auto& inc : incidence_) best = std::max(best, inc.degree);
  return best;
}

std::vector<SpannerEdge> NetSpanner::edges() const {
  std::vector<SpannerEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, e] : edges_) out.push_back(e);
  std::sort(out.begin(), out.end(),
            [](const SpannerEdge& a, const SpannerEdge& b) { return a.key() < b.key(); });
  return out;
}

std::string NetSpanner::dump() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const SpannerEdge& e : edges()) {
    out << e.u.value << ' ' << e.v.value << ' ' << e.length << ' ' << e.scale << '\n';
  }
  return out.str();
}

}  // namespace dynspanner
