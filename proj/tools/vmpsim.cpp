// vmpsim: run, compare, and check the view motion planner in the simulated glasshouse.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "vmp/config.hpp"
#include "vmp/harness.hpp"
#include "vmp/testing/oracles.hpp"

namespace fs = std::filesystem;
using namespace vmp;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitMismatch = 2;

struct CommonOptions {
  std::string config_file;
  std::string scenario;
  std::string scene_file;
  std::string planner;
  std::string out_dir{"out"};
  std::vector<std::string> overrides;
  std::uint64_t seed{0};
  bool seed_set{false};
  int runs{0};
};

RunConfig resolve(const CommonOptions& o) {
  RunConfig c;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ConfigError("cannot open config file '" + o.config_file + "'");
    c = parse_config(in);
  }
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  }
  if (!o.scenario.empty()) c.scenario = o.scenario;
  if (!o.scene_file.empty()) c.scene_file = o.scene_file;
  if (!o.planner.empty()) c.planner = o.planner;
  if (o.seed_set) c.seed = o.seed;
  if (o.runs > 0) c.n_runs = o.runs;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
}

fs::path run_dir(const fs::path& root, const RunConfig& c, const std::string& planner,
                 std::uint64_t seed) {
  return root / scenario_label(c) / planner / ("seed_" + std::to_string(seed));
}

void save_run(const fs::path& dir, const RunConfig& c, const RunResult& r, bool dump_map) {
  fs::create_directories(dir);
  RunConfig used = c;
  used.planner = r.planner;
  used.seed = r.seed;
  write_file(dir / "config.txt", config_to_string(used));
  write_with(dir / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, r.log); });
  write_with(dir / "summary.txt", [&](std::ostream& os) { write_summary(os, r.summary); });
  if (dump_map) write_with(dir / "map.txt", [&](std::ostream& os) { write_map(os, r.map); });
}

int cmd_run(const CommonOptions& o, bool dump_map) {
  const RunConfig c = resolve(o);
  const Scenario sc = load_scenario(c);
  const RunResult r = run_planner(sc, c, c.planner, c.seed);
  const fs::path dir = run_dir(o.out_dir, c, c.planner, c.seed);
  save_run(dir, c, r, dump_map);
  std::cout << scenario_label(c) << " " << c.planner << " seed " << c.seed << ": "
            << r.summary.fruits_detected_final << "/" << sc.scene.fruits.size()
            << " fruits, " << r.summary.poses_executed << " poses, median interval "
            << format_fixed(r.summary.median_inter_pose_interval, 3) << " s -> " << dir.string()
            << "\n";
  return 0;
}

int cmd_compare(const CommonOptions& o, int jobs, bool dump_map) {
  const RunConfig c = resolve(o);
  if (c.n_runs < 2) throw ConfigError("compare needs at least 2 runs");
  const Scenario sc = load_scenario(c);

  struct Job {
    std::string planner;
    std::uint64_t seed;
  };
  std::vector<Job> work;
  for (const std::string p : {"vmp", "rvp"})
    for (int i = 0; i < c.n_runs; ++i) work.push_back({p, c.seed + static_cast<std::uint64_t>(i)});

  std::vector<std::optional<RunResult>> results(work.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        RunResult r = run_planner(sc, c, work[i].planner, work[i].seed);
        save_run(run_dir(o.out_dir, c, r.planner, r.seed), c, r, dump_map);
        std::lock_guard lock(io);
        std::cout << r.planner << " seed " << r.seed << ": " << r.summary.fruits_detected_final
                  << " fruits\n";
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(io);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<RunResult> runs;
  for (auto& r : results) runs.push_back(std::move(*r));

  const fs::path dir = fs::path(o.out_dir) / scenario_label(c) / "compare";
  fs::create_directories(dir);
  write_file(dir / "config.txt", config_to_string(c));
  write_with(dir / "runs.csv", [&](std::ostream& os) { write_runs_csv(os, runs); });
  write_with(dir / "timelines.csv", [&](std::ostream& os) { write_timelines_csv(os, runs); });
  write_with(dir / "detections.svg", [&](std::ostream& os) {
    write_detection_svg(os, runs, c.time_budget, sc.segments.size(), sc.scene.fruits.size());
  });

  std::ostringstream summary;
  std::ostringstream intervals;
  intervals << "planner,n,min,q1,median,q3,max\n";
  for (const std::string p : {"vmp", "rvp"}) {
    std::vector<double> fruits;
    std::vector<double> pooled;
    for (const RunResult& r : runs) {
      if (r.planner != p) continue;
      fruits.push_back(static_cast<double>(r.summary.fruits_detected_final));
      const auto iv = inter_pose_intervals(r.log);
      pooled.insert(pooled.end(), iv.begin(), iv.end());
    }
    const MeanStd ms = mean_std(fruits);
    const BoxSummary b = box_summary(pooled);
    summary << p << ".fruits_mean=" << format_fixed(ms.mean, 3) << "\n"
            << p << ".fruits_std=" << format_fixed(ms.std, 3) << "\n"
            << p << ".interval_median=" << format_fixed(b.median, 3) << "\n";
    intervals << p << "," << b.n << "," << format_fixed(b.min) << "," << format_fixed(b.q1) << ","
              << format_fixed(b.median) << "," << format_fixed(b.q3) << "," << format_fixed(b.max)
              << "\n";
    std::cout << p << ": " << format_fixed(ms.mean, 1) << " +- " << format_fixed(ms.std, 1)
              << " fruits of " << sc.scene.fruits.size() << ", median interval "
              << format_fixed(b.median, 2) << " s\n";
  }
  summary << "fruits_total=" << sc.scene.fruits.size() << "\n";
  write_file(dir / "summary.txt", summary.str());
  write_file(dir / "intervals.csv", intervals.str());
  std::cout << "report -> " << dir.string() << "\n";
  return 0;
}

int cmd_oracle(const std::string& suite) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = testing::suite_names();
  } else {
    names = {suite};
  }
  bool ok = true;
  for (const std::string& n : names) {
    const auto report = testing::run_suite(n);
    if (!report) throw ConfigError("unknown oracle suite '" + n + "'");
    std::cout << (report->ok() ? "PASS " : "FAIL ") << n << ": " << report->cases << " cases, "
              << report->mismatches << " mismatches";
    if (!report->first_failure.empty()) std::cout << " (first: " << report->first_failure << ")";
    std::cout << "\n";
    ok = ok && report->ok();
  }
  return ok ? 0 : kExitMismatch;
}

int cmd_dump_scene(const CommonOptions& o, const std::string& file) {
  const RunConfig c = resolve(o);
  const Scenario sc = load_scenario(c);
  if (file.empty() || file == "-") {
    write_scenario(std::cout, sc);
  } else {
    write_with(file, [&](std::ostream& os) { write_scenario(os, sc); });
  }
  return 0;
}

void add_common(CLI::App* app, CommonOptions& o, bool with_planner) {
  app->add_option("--config", o.config_file, "Config file with 'section.key = value' lines");
  app->add_option("--scenario", o.scenario, "Built-in scenario: scenario1, scenario2, micro");
  app->add_option("--scene", o.scene_file, "Scene file; overrides --scenario");
  if (with_planner) app->add_option("--planner", o.planner, "Planner: vmp or rvp");
  app->add_option("--seed", o.seed, "Random seed (first seed for compare)")
      ->each([&o](const std::string&) { o.seed_set = true; });
  app->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  app->add_option("--set", o.overrides, "Override one config key, e.g. --set planner.k_nn=8");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"View motion planning simulator for fruit monitoring"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  bool run_dump = false;
  auto* run = app.add_subcommand("run", "Run one episode and write its metrics");
  add_common(run, run_opts, true);
  run->add_flag("--dump-map", run_dump, "Also write the final occupancy map");

  CommonOptions cmp_opts;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool cmp_dump = false;
  auto* compare = app.add_subcommand("compare", "Run both planners over several seeds");
  add_common(compare, cmp_opts, false);
  compare->add_option("--runs", cmp_opts.runs, "Seeds per planner (default from config: 5)");
  compare->add_option("--jobs", jobs, "Episodes to run in parallel")->capture_default_str();
  compare->add_flag("--dump-map", cmp_dump, "Also write each run's final occupancy map");

  std::string suite;
  auto* oracle = app.add_subcommand("oracle", "Check components against brute-force oracles");
  oracle->add_option("suite", suite, "search, raycast, frontier, knn, clustering, or all")->required();

  CommonOptions scene_opts;
  std::string scene_out;
  auto* dump = app.add_subcommand("dump-scene", "Write a scenario as a scene file");
  add_common(dump, scene_opts, false);
  dump->add_option("--file", scene_out, "Destination file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, run_dump);
    if (*compare) return cmd_compare(cmp_opts, jobs, cmp_dump);
    if (*oracle) return cmd_oracle(suite);
    if (*dump) return cmd_dump_scene(scene_opts, scene_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
