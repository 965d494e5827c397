#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dynspanner/harness.hpp"

using namespace dynspanner;

int main(int argc, char** argv) {
  CLI::App app{"Drive the dynamic light spanner over a generated or loaded point stream"};
  harness::ScenarioConfig config;
  std::string scenario = "uniform";
  std::string ops = "insert-only";
  std::string mode = "exact";
  std::string check = "final";
  std::string out_path;
  std::string sweep;
  std::string csv_path;

  app.add_option("--scenario", scenario, "uniform | path | clustered | file");
  app.add_option("--n", config.n, "number of generated points");
  app.add_option("--dim", config.dim, "dimension");
  app.add_option("--eps", config.eps, "stretch parameter");
  app.add_option("--phi", config.phi, "aspect ratio bound (power of two)");
  app.add_option("--seed", config.seed, "random seed");
  app.add_option("--mode", mode, "exact | fast");
  app.add_option("--check", check, "none | final | every-k | every-update");
  app.add_option("--check-k", config.check_every, "period for --check every-k");
  app.add_option("--ops", ops, "insert-only | mixed | sliding");
  app.add_option("--updates", config.updates, "mixed: updates after the initial inserts");
  app.add_option("--p-delete", config.p_delete, "mixed: deletion probability");
  app.add_option("--window", config.window, "sliding: live points kept");
  app.add_option("--points-file", config.points_file, "input for --scenario file");
  app.add_option("--out", out_path, "write per-update JSON lines here instead of stdout");
  app.add_option("--sweep", sweep, "comma-separated n values for a lightness sweep");
  app.add_option("--csv", csv_path, "write the sweep table as CSV");
  app.add_flag("--no-timing", config.no_timing, "report time_ns as 0");
  app.add_flag("--inject-fault", config.inject_fault)->group("");
  CLI11_PARSE(app, argc, argv);

  try {
    config.generator = harness::parse_generator(scenario);
    config.ops = harness::parse_ops(ops);
    config.mode = harness::parse_mode(mode);
    config.check = harness::parse_check(check);

    if (!sweep.empty()) {
      std::vector<std::size_t> sizes;
      std::stringstream list(sweep);
      for (std::string item; std::getline(list, item, ',');) sizes.push_back(std::stoul(item));
      const auto rows = harness::lightness_sweep(config, sizes);
      harness::write_csv(std::cout, rows);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        harness::write_csv(csv, rows);
      }
      return 0;
    }

    const harness::RunResult result = harness::run(config);
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot write " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    for (const std::string& line : result.lines) out << line << '\n';
    out << harness::summary_json(result.summary) << '\n';
    for (const std::string& p : result.problems) std::cerr << p << '\n';
    return result.summary.violations == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
