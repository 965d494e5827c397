#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dynspanner/harness.hpp"
#include "dynspanner/oracle.hpp"

using namespace dynspanner;
using namespace dynspanner::harness;

namespace {

// Smallest per-doubling increase of net-tree spanner lightness on the path
// sweep was about 310 (n = 32 -> 64); half of it is required.
constexpr double kNetIncrement = 150.0;
constexpr double kLightSpread = 3.0;
// Geometric mean of max_recourse / log2(phi) over seeds 1..5 at
// phi = 2^8, 2^12, 2^16 (uniform, n = 128, 256 mixed updates, eps = 0.5).
constexpr double kRecourseCenter = 4.68;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct InvariantRun {
  double eps;
  Mode mode;
  RunResult result;
};

ScenarioConfig invariant_config(double eps, Mode mode) {
  ScenarioConfig c;
  c.generator = Generator::uniform;
  c.n = 128;
  c.dim = 2;
  c.phi = 1024;
  c.eps = eps;
  c.ops = Ops::mixed;
  c.updates = 256;
  c.p_delete = 0.4;
  c.mode = mode;
  c.check = CheckPolicy::every_update;
  c.seed = 1;
  c.no_timing = true;
  return c;
}

const char* mode_name(Mode m) { return m == Mode::exact ? "exact" : "fast"; }

void print_problems(const InvariantRun& r) {
  for (std::size_t k = 0; k < std::min<std::size_t>(5, r.result.problems.size()); ++k) {
    std::printf("  %s eps=%g: %s\n", mode_name(r.mode), r.eps, r.result.problems[k].c_str());
  }
}

void invariant_criteria() {
  const std::vector<double> epsilons{0.25, 0.5, 1.0};
  std::vector<InvariantRun> runs;
  for (double eps : epsilons) {
    for (Mode mode : {Mode::exact, Mode::fast}) {
      runs.push_back({eps, mode, run(invariant_config(eps, mode))});
    }
  }

  const std::size_t expected_checks = 128 + 256;
  auto all_checked = [&](const InvariantRun& r) {
    return r.result.summary.counts.checks == expected_checks;
  };

  {
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
      if (r.mode != Mode::exact) continue;
      const auto& s = r.result.summary;
      ok = ok && all_checked(r) && s.counts.invariant == 0;
      detail += fmt("eps=%g checks=%zu violations=%zu; ", r.eps, s.counts.checks,
                    s.counts.invariant);
      if (s.counts.invariant) print_problems(r);
    }
    report(1, "invariants, exact mode", ok, detail);
  }
  {
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
      if (r.mode != Mode::fast) continue;
      const auto& s = r.result.summary;
      ok = ok && all_checked(r) && s.counts.invariant == 0 && s.counts.estimates == 0;
      detail += fmt("eps=%g checks=%zu violations=%zu estimate failures=%zu; ", r.eps,
                    s.counts.checks, s.counts.invariant, s.counts.estimates);
      if (s.counts.invariant || s.counts.estimates) print_problems(r);
    }
    report(2, "invariants and estimates, fast mode", ok, detail);
  }
  auto stretch_ok = [](const InvariantRun& r) {
    const auto& s = r.result.summary;
    return s.counts.stretch == 0 && s.max_stretch <= 1 + 3 * r.eps + 1e-9;
  };
  {
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
      ok = ok && stretch_ok(r);
      detail += fmt("%s eps=%g max=%.4f bound=%.2f; ", mode_name(r.mode), r.eps,
                    r.result.summary.max_stretch, 1 + 3 * r.eps);
    }
    report(3, "stretch", ok, detail);
  }
  {
    bool ok = true;
    std::size_t checks = 0;
    std::string detail;
    for (const auto& r : runs) {
      const auto& s = r.result.summary;
      ok = ok && all_checked(r) && s.counts.net == 0 && s.counts.locality == 0;
      checks += s.counts.checks;
      if (s.counts.net || s.counts.locality) {
        detail += fmt("%s eps=%g net=%zu locality=%zu; ", mode_name(r.mode), r.eps,
                      s.counts.net, s.counts.locality);
        print_problems(r);
      }
    }
    detail += fmt("%zu updates checked across %zu runs", checks, runs.size());
    report(7, "net validity and locality", ok, detail);
  }
  {
    bool ok = true;
    std::string detail;
    for (double eps : epsilons) {
      const InvariantRun* exact = nullptr;
      const InvariantRun* fast = nullptr;
      for (const auto& r : runs) {
        if (r.eps == eps) (r.mode == Mode::exact ? exact : fast) = &r;
      }
      const bool same = exact->result.summary.edge_count == fast->result.summary.edge_count &&
                        exact->result.summary.light_weight == fast->result.summary.light_weight;
      ok = ok && exact->result.summary.violations == 0 && fast->result.summary.violations == 0 &&
           stretch_ok(*exact) && stretch_ok(*fast);
      detail += fmt("eps=%g edges %zu/%zu%s; ", eps, exact->result.summary.edge_count,
                    fast->result.summary.edge_count, same ? " (same weight)" : "");
    }
    report(8, "mode agreement", ok, detail);
  }
}

void lightness_criterion() {
  ScenarioConfig c;
  c.generator = Generator::path;
  c.dim = 1;
  c.eps = 0.5;
  c.phi = 32;
  const auto rows = lightness_sweep(c, {32, 64, 128, 256, 512, 1024});
  double min_inc = INFINITY;
  double lo = INFINITY, hi = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k > 0) min_inc = std::min(min_inc, rows[k].net_lightness - rows[k - 1].net_lightness);
    lo = std::min(lo, rows[k].light_lightness);
    hi = std::max(hi, rows[k].light_lightness);
  }
  const bool ok = min_inc >= kNetIncrement && hi / lo <= kLightSpread;
  std::string detail = fmt("net lightness %.1f -> %.1f, min increment %.1f (need %.0f); ",
                           rows.front().net_lightness, rows.back().net_lightness, min_inc,
                           kNetIncrement);
  detail += fmt("light lightness max/min %.3f (need <= %.0f)", hi / lo, kLightSpread);
  report(4, "lightness separation on the path", ok, detail);
}

void recourse_criterion() {
  bool ok = true;
  std::string detail;
  for (int lg : {8, 12, 16}) {
    ScenarioConfig c;
    c.n = 128;
    c.dim = 2;
    c.eps = 0.5;
    c.phi = std::ldexp(1.0, lg);
    c.ops = Ops::mixed;
    c.updates = 256;
    c.check = CheckPolicy::none;
    c.no_timing = true;
    const RunSummary s = run(c).summary;
    const double ratio = double(s.max_recourse) / lg;
    ok = ok && ratio >= kRecourseCenter / 2 && ratio <= kRecourseCenter * 2;
    detail += fmt("log2 phi=%d max=%zu ratio=%.3f; ", lg, s.max_recourse, ratio);
  }
  detail += fmt("band [%.2f, %.2f]", kRecourseCenter / 2, kRecourseCenter * 2);
  report(5, "recourse scaling", ok, detail);
}

void oracle_criterion() {
  using oracle::WeightedEdge;
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(1, 50)(rng);
    const double density = std::uniform_real_distribution<double>(0.02, 0.3)(rng);
    std::uniform_int_distribution<int> w(1, 100);
    std::vector<WeightedEdge> edges;
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t b = a + 1; b < n; ++b) {
        if (std::bernoulli_distribution(density)(rng)) {
          edges.push_back({PointId{a}, PointId{b}, double(w(rng))});
        }
      }
    }
    const auto fw = oracle::floyd_warshall(n, edges);
    for (std::uint32_t a = 0; a < n; ++a) {
      for (std::uint32_t b = 0; b < n; ++b) {
        if (oracle::graph_distance(edges, PointId{a}, PointId{b}) != fw[a][b]) ++mismatches;
      }
    }
  }
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    MetricSpace space(dim, 1 << 20);
    std::uniform_real_distribution<double> coord(0, 1000);
    const int n = std::uniform_int_distribution<int>(1, 100)(rng);
    for (int k = 0; k < n; ++k) {
      std::vector<double> p(dim);
      for (double& x : p) x = coord(rng);
      space.activate(space.add_point(p));
    }
    const auto pts = space.active_points();
    const double prim = oracle::mst_weight(space, pts);
    const double kruskal = oracle::mst_weight_kruskal(space, pts);
    worst = std::max(worst, std::abs(prim - kruskal));
  }
  report(6, "oracle cross-validation", mismatches == 0 && worst <= 1e-9,
         fmt("Dijkstra vs Floyd-Warshall mismatches=%zu over 200 graphs; "
             "Prim vs Kruskal max diff=%.3g over 100 instances",
             mismatches, worst));
}

}  // namespace

int main() {
  oracle_criterion();
  lightness_criterion();
  recourse_criterion();
  invariant_criteria();
  std::printf("%s\n", failures == 0 ? "ALL PASS" : "SOME CRITERIA FAILED");
  return failures == 0 ? 0 : 1;
}
