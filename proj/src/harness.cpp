#include "dynspanner/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dynspanner/oracle.hpp"

namespace dynspanner::harness {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxProblems = 50;
constexpr int kMaxRejections = 100000;

double next_pow2(double x) {
  double p = 1;
  while (p < x) p *= 2;
  return p;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Draws points one at a time, rejecting any closer than 1 to an earlier one.
class PointSource {
 public:
  PointSource(const ScenarioConfig& config, std::mt19937_64& rng)
      : config_(config), rng_(&rng) {
    side_ = std::floor(config.phi / std::sqrt(static_cast<double>(config.dim)));
    if (config.generator != Generator::path && side_ < 1) {
      throw std::invalid_argument("phi too small for dim " + std::to_string(config.dim));
    }
    if (config.generator == Generator::clustered) {
      std::uniform_real_distribution<double> coord(0.0, side_);
      const std::size_t k = std::max<std::size_t>(2, config.n / 16);
      for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> center(config.dim);
        for (double& x : center) x = coord(*rng_);
        centers_.push_back(std::move(center));
      }
    }
  }

  std::vector<double> next() {
    if (config_.generator == Generator::path) {
      const double x = static_cast<double>(drawn_.size() + 1);
      if (x - 1 > config_.phi) {
        throw std::invalid_argument("path of " + std::to_string(drawn_.size() + 1) +
                                    " points does not fit phi");
      }
      std::vector<double> p(config_.dim, 0.0);
      p[0] = x;
      drawn_.push_back(p);
      return p;
    }
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
      std::vector<double> p = candidate();
      if (!inside(p)) continue;
      const bool clear = std::none_of(drawn_.begin(), drawn_.end(), [&](const auto& q) {
        return euclid(p, q) < 1.0;
      });
      if (clear) {
        drawn_.push_back(p);
        return p;
      }
    }
    throw std::invalid_argument("cannot place point " + std::to_string(drawn_.size() + 1) +
                                " at min distance 1 within phi");
  }

 private:
  std::vector<double> candidate() {
    std::uniform_real_distribution<double> coord(0.0, side_);
    std::vector<double> p(config_.dim);
    if (config_.generator == Generator::uniform) {
      for (double& x : p) x = coord(*rng_);
      return p;
    }
    // clustered: offsets at a random power-of-two spread around a center
    std::uniform_int_distribution<std::size_t> pick(0, centers_.size() - 1);
    const int top = std::max(0, static_cast<int>(std::log2(side_)) - 2);
    std::uniform_int_distribution<int> spread(0, top);
    const auto& center = centers_[pick(*rng_)];
    std::normal_distribution<double> offset(0.0, pow2(spread(*rng_)));
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = center[k] + offset(*rng_);
    return p;
  }

  bool inside(const std::vector<double>& p) const {
    return std::all_of(p.begin(), p.end(), [&](double x) { return x >= 0 && x <= side_; });
  }

  const ScenarioConfig& config_;
  std::mt19937_64* rng_;
  double side_ = 0;
  std::vector<std::vector<double>> centers_;
  std::vector<std::vector<double>> drawn_;
};

Stream from_file(const ScenarioConfig& config) {
  if (config.ops == Ops::mixed) {
    throw std::invalid_argument("mixed ops need a point generator, not a file");
  }
  std::ifstream in(config.points_file);
  if (!in) throw std::invalid_argument("cannot open points file " + config.points_file);
  const auto records = read_point_file(in);
  Stream stream;
  stream.phi = config.phi;
  stream.dim = records.empty() ? config.dim : records.front().coords.size();
  std::vector<PointId> alive;
  for (const PointRecord& r : records) {
    stream.updates.push_back({OpKind::insert, r.id, r.coords});
    alive.push_back(r.id);
    if (config.ops == Ops::sliding && config.window > 0 && alive.size() > config.window) {
      stream.updates.push_back({OpKind::remove, alive.front(), {}});
      alive.erase(alive.begin());
    }
  }
  return stream;
}

json edge_list(const std::vector<EdgeKey>& keys) {
  json out = json::array();
  for (EdgeKey k : keys) out.push_back({k.lo.value, k.hi.value});
  return out;
}

void note(RunResult& result, const std::string& msg) {
  if (result.problems.size() < kMaxProblems) result.problems.push_back(msg);
}

void run_checks(const LightSpanner& ls, const MetricSpace& space, double eps,
                const std::string& where, RunResult& result) {
  CheckCounts& counts = result.summary.counts;
  ++counts.checks;
  const auto light = ls.edges();
  const auto report = oracle::check_invariants(space, ls.spanner().edges(), light, eps);
  counts.invariant += report.violations.size();
  for (const auto& v : report.violations) {
    std::ostringstream msg;
    msg << where << ": invariant "
        << (v.which == oracle::Invariant::stretch     ? "stretch"
            : v.which == oracle::Invariant::lightness ? "lightness"
                                                      : "subset")
        << " on (" << v.edge.lo.value << ", " << v.edge.hi.value << ") d*=" << v.dstar
        << " threshold=" << v.threshold;
    note(result, msg.str());
  }
  if (space.active_count() >= 2) {
    const double stretch = oracle::max_stretch(space, light);
    if (stretch > 1.0 + 3.0 * eps + 1e-9) {
      ++counts.stretch;
      note(result, where + ": stretch " + std::to_string(stretch));
    }
  }
  const auto net = oracle::validate_net_hierarchy(ls.net(), space);
  counts.net += net.problems.size();
  for (const auto& p : net.problems) note(result, where + ": net " + p);

  if (ls.small_spanner()) {
    const auto missing = ls.missing_estimates();
    counts.estimates += missing.size();
    for (EdgeKey k : missing) {
      note(result, where + ": missing estimate for (" + to_string(k.lo) + ", " +
                       to_string(k.hi) + ")");
    }
    const auto sweep = oracle::check_estimates(space, light, ls.estimates());
    counts.estimates += sweep.failures.size();
    for (const auto& f : sweep.failures) {
      std::ostringstream msg;
      msg << where << ": " << (f.is_dstar ? "d*" : "dL") << " estimate on (" << f.edge.lo.value
          << ", " << f.edge.hi.value << ") stored=" << f.stored << " exact=" << f.exact
          << " alpha=" << f.alpha;
      note(result, msg.str());
    }
  }
}

}  // namespace

Generator parse_generator(const std::string& s) {
  if (s == "uniform" || s == "uniform-cube") return Generator::uniform;
  if (s == "path") return Generator::path;
  if (s == "clustered") return Generator::clustered;
  if (s == "file") return Generator::file;
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

Ops parse_ops(const std::string& s) {
  if (s == "insert-only") return Ops::insert_only;
  if (s == "mixed") return Ops::mixed;
  if (s == "sliding" || s == "sliding-window") return Ops::sliding;
  throw std::invalid_argument("unknown ops '" + s + "'");
}

CheckPolicy parse_check(const std::string& s) {
  if (s == "none") return CheckPolicy::none;
  if (s == "final") return CheckPolicy::final;
  if (s == "every-k") return CheckPolicy::every_k;
  if (s == "every-update") return CheckPolicy::every_update;
  throw std::invalid_argument("unknown check policy '" + s + "'");
}

Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::exact;
  if (s == "fast") return Mode::fast;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

Stream generate(const ScenarioConfig& config) {
  if (config.generator == Generator::file) return from_file(config);
  if (config.dim == 0) throw std::invalid_argument("dim must be positive");
  std::mt19937_64 rng(config.seed);
  PointSource source(config, rng);
  Stream stream;
  stream.dim = config.dim;
  stream.phi = config.phi;
  std::uint32_t next_id = 0;
  std::vector<PointId> alive;

  auto insert = [&] {
    const PointId id{next_id++};
    stream.updates.push_back({OpKind::insert, id, source.next()});
    alive.push_back(id);
  };
  for (std::size_t k = 0; k < config.n; ++k) {
    insert();
    if (config.ops == Ops::sliding) {
      const std::size_t window = config.window ? config.window : std::max<std::size_t>(1, config.n / 2);
      if (alive.size() > window) {
        stream.updates.push_back({OpKind::remove, alive.front(), {}});
        alive.erase(alive.begin());
      }
    }
  }
  if (config.ops == Ops::mixed) {
    const std::size_t updates = config.updates ? config.updates : config.n;
    std::bernoulli_distribution del(config.p_delete);
    for (std::size_t k = 0; k < updates; ++k) {
      if (del(rng) && alive.size() > 2) {
        std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
        const std::size_t at = pick(rng);
        stream.updates.push_back({OpKind::remove, alive[at], {}});
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(at));
      } else {
        insert();
      }
    }
  }
  return stream;
}

RunResult run(const ScenarioConfig& config) { return run(config, generate(config)); }

RunResult run(const ScenarioConfig& config, const Stream& stream) {
  RunResult result;
  MetricSpace space(stream.dim, stream.phi);
  LightSpannerOptions options;
  options.eps = config.eps;
  options.mode = config.mode;
  options.skip_recompute = config.inject_fault;
  LightSpanner ls(space, options);
  RunSummary& s = result.summary;

  std::size_t total_recourse = 0;
  double total_time = 0;
  const std::size_t count = stream.updates.size();
  for (std::size_t k = 0; k < count; ++k) {
    const Update& u = stream.updates[k];
    UpdateReport report;
    if (u.op == OpKind::insert) {
      space.add_point(u.id, u.coords);
      space.activate(u.id);
      report = ls.insert(u.id);
    } else {
      report = ls.remove(u.id);
      space.deactivate(u.id);
    }
    if (config.no_timing) report.time_ns = 0;

    json line{{"op", to_string(report.op)},
              {"id", report.id.value},
              {"added", edge_list(report.added)},
              {"removed", edge_list(report.removed)},
              {"time_ns", report.time_ns}};
    result.lines.push_back(line.dump());

    s.max_recourse = std::max(s.max_recourse, report.recourse);
    total_recourse += report.recourse;
    s.max_time_ns = std::max(s.max_time_ns, report.time_ns);
    total_time += static_cast<double>(report.time_ns);

    if (config.check == CheckPolicy::none) continue;
    const std::string where = "update " + std::to_string(k) + " (" + to_string(u.op) + " " +
                              to_string(u.id) + ")";
    const auto locality = oracle::check_net_locality(space, report.net_changes, u.id, u.op);
    s.counts.locality += locality.problems.size();
    for (const auto& p : locality.problems) note(result, where + ": locality " + p);

    const bool due = config.check == CheckPolicy::every_update ||
                     (config.check == CheckPolicy::every_k &&
                      (k + 1) % std::max<std::size_t>(1, config.check_every) == 0) ||
                     k + 1 == count;
    if (due) run_checks(ls, space, config.eps, where, result);
  }

  s.updates = count;
  s.points = space.active_count();
  s.edge_count = ls.edge_count();
  s.light_weight = ls.total_weight();
  s.net_spanner_weight = ls.spanner().total_weight();
  if (count > 0) {
    s.mean_recourse = static_cast<double>(total_recourse) / static_cast<double>(count);
    s.mean_time_ns = total_time / static_cast<double>(count);
  }
  if (s.points >= 2) {
    s.mst_weight = oracle::mst_weight(space);
    s.lightness = s.light_weight / s.mst_weight;
    s.max_stretch = oracle::max_stretch(space, ls.edges());
  }
  s.violations = s.counts.total();
  return result;
}

std::string summary_json(const RunSummary& s) {
  json out{{"updates", s.updates},
           {"points", s.points},
           {"lightness", s.lightness},
           {"max_stretch", s.max_stretch},
           {"mst_weight", s.mst_weight},
           {"light_weight", s.light_weight},
           {"net_spanner_weight", s.net_spanner_weight},
           {"edge_count", s.edge_count},
           {"max_recourse", s.max_recourse},
           {"mean_recourse", s.mean_recourse},
           {"max_time_ns", s.max_time_ns},
           {"mean_time_ns", s.mean_time_ns},
           {"violations", s.violations},
           {"checks", s.counts.checks}};
  return json{{"summary", out}}.dump();
}

std::vector<SweepRow> lightness_sweep(const ScenarioConfig& base,
                                      const std::vector<std::size_t>& sizes) {
  std::vector<SweepRow> rows;
  for (std::size_t n : sizes) {
    ScenarioConfig config = base;
    config.n = n;
    config.ops = Ops::insert_only;
    if (config.generator == Generator::path) {
      config.phi = std::max(config.phi, next_pow2(static_cast<double>(n)));
    }
    const Stream stream = generate(config);
    MetricSpace space(stream.dim, stream.phi);
    LightSpannerOptions options;
    options.eps = config.eps;
    options.mode = config.mode;
    LightSpanner ls(space, options);
    for (const Update& u : stream.updates) {
      space.add_point(u.id, u.coords);
      space.activate(u.id);
      ls.insert(u.id);
    }
    SweepRow row{n, 1.0, 1.0};
    if (space.active_count() >= 2) {
      const double mst = oracle::mst_weight(space);
      row.net_lightness = ls.spanner().total_weight() / mst;
      row.light_lightness = ls.total_weight() / mst;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,net_tree_lightness,light_spanner_lightness\n";
  for (const SweepRow& r : rows) {
    out << r.n << ',' << r.net_lightness << ',' << r.light_lightness << '\n';
  }
}

}  // namespace dynspanner::harness
