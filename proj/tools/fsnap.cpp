// fsnap: drive F-snapshot executions and check them.
//
// Exit status: 0 when every check passes, 1 on a verified failure
// (including an exhausted budget), 2 on a usage error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsnap/fsnap.hpp"

namespace fs = std::filesystem;
using fsnap::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  std::size_t n = 2;
  std::string function = "sum-mod:10";
  fsnap::Value x0 = 0;
  std::size_t ops = 0;  // 0: per-command default
  std::uint64_t schedules = 1000;
  std::uint64_t seed = 0;
  std::uint64_t budget = 18;
  std::uint64_t max_schedules = 1'000'000;
  std::vector<std::string> programs;
  std::string mutation = "none";
  std::string backend = "simulated";
  std::string report;
  std::string trace_dir = "fsnap-traces";
  std::string csv;
  std::string trace;
  std::uint64_t updates = 100'000;
  std::uint64_t sample_every = 1000;
  bool keep_going = false;
};

std::size_t workers_from_env() {
  const char* env = std::getenv("FSNAP_WORKERS");
  if (!env || !*env) return 1;
  try {
    const auto w = std::stoul(env);
    if (w == 0) throw fsnap::UsageError("FSNAP_WORKERS must be positive");
    return w;
  } catch (const std::logic_error&) {
    throw fsnap::UsageError(std::string("FSNAP_WORKERS is not a number: ") + env);
  }
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

// The timestamp lives only under "generated_at"; the rest is a function
// of the flags.
void emit_report(const Options& opt, const std::string& command, json config, json result) {
  json doc;
  doc["generated_at"] = utc_now();
  doc["command"] = command;
  doc["config"] = std::move(config);
  doc["result"] = std::move(result);
  const auto text = doc.dump(2) + "\n";
  if (opt.report.empty()) {
    std::cout << text;
  } else {
    fsnap::write_file_atomically(opt.report, text);
    std::cout << command << ": report written to " << opt.report << "\n";
  }
}

json base_config(const Options& opt) {
  return json{{"n", opt.n},
              {"function", opt.function},
              {"x0", opt.x0},
              {"mutation", opt.mutation}};
}

std::vector<std::string> write_failure_traces(const Options& opt,
                                              const std::vector<fsnap::RunFailure>& failures,
                                              const std::string& prefix) {
  std::vector<std::string> paths;
  for (const auto& f : failures) {
    if (f.trace.empty()) continue;
    fs::create_directories(opt.trace_dir);
    const fsnap::TraceMeta meta{opt.n, opt.function, opt.x0,
                                fsnap::parse_mutation(opt.mutation), f.programs};
    const auto path = fs::path(opt.trace_dir) /
                      (prefix + "-" + std::to_string(f.index) + ".trace.jsonl");
    fsnap::write_file_atomically(path, fsnap::trace_to_jsonl(meta, f.trace));
    paths.push_back(path.string());
  }
  return paths;
}

void print_failure_hint(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cerr << "failing trace: " << p << "  (fsnap replay " << p << ")\n";
}

int cmd_explore(const Options& opt) {
  const auto f = fsnap::make_function(opt.function, opt.n);
  fsnap::Programs programs;
  if (!opt.programs.empty()) {
    if (opt.programs.size() != opt.n)
      throw fsnap::UsageError("--program given " + std::to_string(opt.programs.size()) +
                              " times; expected one per process (n = " +
                              std::to_string(opt.n) + ")");
    std::vector<std::vector<fsnap::OpKind>> shapes;
    for (const auto& p : opt.programs) shapes.push_back(fsnap::parse_program_shape(p));
    programs = fsnap::make_programs(std::move(shapes));
  } else {
    programs = fsnap::alternating_programs(opt.n, opt.ops ? opt.ops : 2);
  }
  const fsnap::SimConfig cfg{opt.n, &f, opt.x0, fsnap::parse_mutation(opt.mutation)};
  const fsnap::ExploreBudget budget{opt.budget, opt.max_schedules};

  auto config = base_config(opt);
  config["programs"] = fsnap::programs_to_json(programs);
  config["budget"] = opt.budget;
  config["max_schedules"] = opt.max_schedules;

  fsnap::ExplorationReport report;
  try {
    report = fsnap::explore(cfg, programs, budget, workers_from_env());
  } catch (const fsnap::BudgetExceeded& e) {
    emit_report(opt, "explore", config,
                json{{"budget_exceeded", true}, {"error", e.what()}, {"ok", false}});
    std::cerr << "explore: " << e.what() << "\n";
    return kFail;
  }
  const auto paths = write_failure_traces(opt, report.failures, "explore");
  auto result = fsnap::exploration_to_json(report);
  result["trace_files"] = paths;
  emit_report(opt, "explore", config, result);
  if (report.budget_exceeded)
    std::cerr << "explore: schedule limit " << opt.max_schedules << " reached\n";
  print_failure_hint(paths);
  return report.ok() ? kPass : kFail;
}

int cmd_fuzz(const Options& opt) {
  const auto f = fsnap::make_function(opt.function, opt.n);
  fsnap::FuzzConfig fc;
  fc.n = opt.n;
  fc.f = &f;
  fc.x0 = opt.x0;
  fc.ops_per_proc = opt.ops ? opt.ops : 3;
  fc.schedules = opt.schedules;
  fc.seed = opt.seed;
  fc.mutation = fsnap::parse_mutation(opt.mutation);
  if (opt.backend == "simulated") {
    fc.backend = fsnap::Backend::simulated;
  } else if (opt.backend == "native") {
    fc.backend = fsnap::Backend::native;
  } else {
    throw fsnap::UsageError("unknown backend '" + opt.backend + "'");
  }
  fc.stop_on_failure = !opt.keep_going;
  fc.workers = workers_from_env();

  auto config = base_config(opt);
  config["ops"] = fc.ops_per_proc;
  config["schedules"] = fc.schedules;
  config["seed"] = fc.seed;
  config["backend"] = opt.backend;
  config["keep_going"] = opt.keep_going;

  const auto report = fsnap::fuzz(fc);
  const auto paths = write_failure_traces(opt, report.failures, "fuzz");
  auto result = fsnap::fuzz_to_json(report);
  result["trace_files"] = paths;
  emit_report(opt, "fuzz", config, result);
  if (!report.ok() && !report.failures.empty() && report.failures.front().seed)
    std::cerr << "fuzz: failure at run " << report.failures.front().index << ", run seed "
              << *report.failures.front().seed << "\n";
  print_failure_hint(paths);
  return report.ok() ? kPass : kFail;
}

int cmd_replay(const Options& opt) {
  fsnap::TraceFile tf;
  try {
    tf = fsnap::read_trace_file(opt.trace);
  } catch (const fsnap::Error& e) {
    throw fsnap::UsageError(e.what());
  }
  const auto report = fsnap::replay(tf.meta, tf.events);
  json config{{"trace", opt.trace},
              {"n", tf.meta.n},
              {"function", tf.meta.function},
              {"x0", tf.meta.x0},
              {"mutation", fsnap::to_string(tf.meta.mutation)}};
  json result{{"events", tf.events.size()},
              {"reproduced", report.reproduced},
              {"divergence", report.divergence},
              {"findings", fsnap::findings_to_json(report.recorded.findings)},
              {"finding_count", report.recorded.finding_count},
              {"monitor_counts", report.recorded.counts},
              {"ok", report.ok()}};
  if (report.recorded.check) {
    result["linearizable"] = report.recorded.check->linearizable;
    result["longest_linearizable_prefix"] = report.recorded.check->longest_prefix;
  }
  emit_report(opt, "replay", config, result);
  const auto& findings = report.recorded.findings;
  for (std::size_t k = 0; k < findings.size() && k < 8; ++k)
    std::cerr << "replay: " << findings[k].monitor << " at step " << findings[k].step << ": "
              << findings[k].detail << "\n";
  if (report.recorded.finding_count > 8)
    std::cerr << "replay: " << report.recorded.finding_count - 8 << " more findings in the report\n";
  return report.ok() ? kPass : kFail;
}

int cmd_oracle_diff(const Options& opt) {
  const auto f = fsnap::make_function(opt.function, opt.n);
  const auto ops = opt.ops ? opt.ops : 3;
  const auto report = fsnap::oracle_diff(opt.n, f, opt.x0, ops, opt.schedules, opt.seed);
  auto config = base_config(opt);
  config["ops"] = ops;
  config["schedules"] = opt.schedules;
  config["seed"] = opt.seed;
  emit_report(opt, "oracle-diff", config, fsnap::oracle_diff_to_json(report));
  return report.ok() ? kPass : kFail;
}

int cmd_bound_check(const Options& opt) {
  const auto f = fsnap::make_function(opt.function, opt.n);
  fsnap::BoundConfig bc;
  bc.n = opt.n;
  bc.f = &f;
  bc.x0 = opt.x0;
  bc.updates = opt.updates;
  bc.seed = opt.seed;
  bc.sample_every = opt.sample_every;
  if (bc.sample_every == 0) throw fsnap::UsageError("--sample-every must be positive");
  const auto report = fsnap::bound_check(bc);
  auto config = base_config(opt);
  config["updates"] = bc.updates;
  config["seed"] = bc.seed;
  config["sample_every"] = bc.sample_every;
  emit_report(opt, "bound-check", config, fsnap::bound_to_json(report));
  if (!opt.csv.empty()) fsnap::write_file_atomically(opt.csv, fsnap::bound_curve_csv(report));
  const bool ok = report.within_bound() && report.plateaued() && report.v_grows() &&
                  report.monitor_findings == 0;
  if (!report.plateaued())
    std::cerr << "bound-check: Flags still gaining new values; last new value at update "
              << report.last_new_flags_value_at << " of " << report.updates << "\n";
  return ok ? kPass : kFail;
}

int cmd_bench(const Options& opt) {
  const auto f = fsnap::make_function(opt.function, opt.n);
  const auto ops = opt.ops ? opt.ops : 1000;
  const auto r = fsnap::bench(opt.n, f, opt.x0, ops, opt.seed);
  auto config = base_config(opt);
  config["ops"] = ops;
  config["seed"] = opt.seed;
  const bool ok = r.accesses_per_update == double(fsnap::kUpdateSteps) &&
                  (r.fscans == 0 || r.accesses_per_fscan == double(fsnap::kFscanSteps)) &&
                  r.native_access_findings == 0;
  // Wall times vary run to run, so they go to stderr, not the report.
  std::cerr << std::fixed << std::setprecision(3) << "bench: simulated "
            << r.simulated_seconds << " s, native " << r.native_seconds << " s\n";
  emit_report(opt, "bench", config,
              json{{"updates", r.updates},
                   {"fscans", r.fscans},
                   {"accesses_per_update", r.accesses_per_update},
                   {"accesses_per_fscan", r.accesses_per_fscan},
                   {"native_access_findings", r.native_access_findings},
                   {"ok", ok}});
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explore, fuzz and check executions of a wait-free F-snapshot object"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--n", opt.n, "Number of processes")->check(CLI::Range(std::size_t{1}, std::size_t{4096}));
    sub->add_option("--function", opt.function,
                    "F: sum-mod:<k>, max-pid, all-equal or identity");
    sub->add_option("--x0", opt.x0, "Initial segment value");
    sub->add_option("--seed", opt.seed, "Base seed");
    sub->add_option("--report", opt.report, "Write the JSON report here instead of stdout");
  };
  auto with_mutation = [&](CLI::App* sub) {
    sub->add_option("--mutation", opt.mutation,
                    "Deliberate defect: none, skip-null-clear, constant-next");
    sub->add_option("--trace-dir", opt.trace_dir, "Directory for failing-run traces");
  };

  auto* explore = app.add_subcommand("explore", "Run every interleaving of fixed programs");
  common(explore);
  with_mutation(explore);
  explore->add_option("--ops", opt.ops, "Alternating update/fscan ops per process");
  explore->add_option("--program", opt.programs,
                      "Program of one process, e.g. \"u f\" (repeat once per process)");
  explore->add_option("--budget", opt.budget, "Maximum atomic steps per schedule");
  explore->add_option("--max-schedules", opt.max_schedules, "Stop after this many schedules");

  auto* fuzz = app.add_subcommand("fuzz", "Run random programs under random schedules");
  common(fuzz);
  with_mutation(fuzz);
  fuzz->add_option("--ops", opt.ops, "Operations per process");
  fuzz->add_option("--schedules", opt.schedules, "Number of runs");
  fuzz->add_option("--backend", opt.backend, "simulated or native");
  fuzz->add_flag("--keep-going", opt.keep_going, "Continue past the first failing run");

  auto* replay = app.add_subcommand("replay", "Re-execute a recorded trace and re-check it");
  replay->add_option("trace", opt.trace, "Trace file (JSON lines)")->required();
  replay->add_option("--report", opt.report, "Write the JSON report here instead of stdout");

  auto* odiff = app.add_subcommand("oracle-diff", "Compare sequential runs with the oracle");
  common(odiff);
  odiff->add_option("--ops", opt.ops, "Operations per process");
  odiff->add_option("--schedules", opt.schedules, "Number of runs");

  auto* bound = app.add_subcommand("bound-check", "Count distinct Flags values over a long run");
  common(bound);
  bound->add_option("--updates", opt.updates, "Total updates");
  bound->add_option("--sample-every", opt.sample_every, "Curve sampling period in updates");
  bound->add_option("--csv", opt.csv, "Write the distinct-values curve as CSV");

  auto* bench = app.add_subcommand("bench", "Access counts and wall time");
  common(bench);
  bench->add_option("--ops", opt.ops, "Operations per process");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*explore) return cmd_explore(opt);
    if (*fuzz) return cmd_fuzz(opt);
    if (*replay) return cmd_replay(opt);
    if (*odiff) return cmd_oracle_diff(opt);
    if (*bound) return cmd_bound_check(opt);
    if (*bench) return cmd_bench(opt);
  } catch (const fsnap::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const fsnap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
