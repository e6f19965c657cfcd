#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "bulkres/max_flow.hpp"
#include "bulkres/metrics.hpp"
#include "bulkres/network.hpp"
#include "bulkres/path_dispersion.hpp"
#include "bulkres/schedulers.hpp"
#include "bulkres/simulation.hpp"
#include "json.hpp"

namespace bulkres::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by several commands. Sizes are in terabytes on the
// command line.
struct Options {
  std::string topology;
  std::string topology_file;
  std::string scheduler = "batchall";
  int k = 0;
  std::string dist = "pareto";
  double mean_tb = 2.475;
  double beta = 2.5;
  double xm_tb = 1.48;
  double gamma_tb = 0.00625;
  double rate = 100.0;
  int requests = 1000;
  std::uint64_t seed = 1;
  std::string trace_file;
  double warmup = 0.1;
  bool no_check = false;
  std::string log_file;
  std::string summary_file;
  std::string paths_file;
  std::string out_file;
  std::string loads;
  std::string schedulers;
  int jobs = 1;
  double eps = 1.0;
  std::string src;
  std::string dst;
  double alpha = 0.0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

// Sends `text` to `path`, or to `out` when no path is given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) out << text;
  else write_file(path, text);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Network load_network(const Options& o) {
  if (o.topology.empty() == o.topology_file.empty())
    throw UsageError("give exactly one of --topology and --topology-file");
  try {
    if (!o.topology_file.empty()) return parse_topology(read_file(o.topology_file));
    return topo::from_spec(o.topology);
  } catch (const TopologyError& e) {
    throw UsageError(e.what());
  }
}

SizeDistribution size_distribution(const Options& o) {
  SizeDistribution d;
  if (o.dist == "pareto")
    d = SizeDistribution::pareto(o.beta, o.xm_tb * kBitsPerTerabyte, o.gamma_tb * kBitsPerTerabyte);
  else if (o.dist == "exponential")
    d = SizeDistribution::exponential(o.mean_tb * kBitsPerTerabyte);
  else if (o.dist == "constant")
    d = SizeDistribution::constant(o.mean_tb * kBitsPerTerabyte);
  else
    throw UsageError("unknown size distribution '" + o.dist + "'");
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return d;
}

WorkloadSpec workload(const Options& o, double rate) {
  WorkloadSpec spec;
  spec.arrival_rate = rate;
  spec.size = size_distribution(o);
  spec.num_requests = o.requests;
  spec.seed = o.seed;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

std::vector<Job> load_trace(const Options& o, const Network& net, double rate) {
  if (!o.trace_file.empty()) {
    try {
      return parse_trace_csv(net, read_file(o.trace_file));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return generate_trace(workload(o, rate), net);
}

SchedulerConfig scheduler_config(const std::string& name, int k) {
  try {
    return parse_scheduler(name, k);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Effective option values of a parsed command, for echoing into outputs.
ordered_json effective_config(const CLI::App& app) {
  ordered_json cfg;
  cfg["command"] = app.get_name();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (opt == app.get_help_ptr() || name.empty() || name == "--config") continue;
    const std::string key = name.substr(name.find_first_not_of('-'));
    if (opt->get_expected_max() == 0) {
      cfg[key] = opt->count() > 0;
    } else if (opt->count() > 0) {
      cfg[key] = opt->results().back();
    } else {
      cfg[key] = opt->get_default_str();
    }
  }
  return cfg;
}

std::string config_line(const CLI::App& app) {
  return "# config " + effective_config(app).dump() + "\n";
}

ordered_json summary_json(const Summary& s) {
  ordered_json j;
  j["scheduler"] = s.scheduler;
  j["topology_id"] = s.topology_id;
  j["requests"] = s.requests;
  j["completed"] = s.completed;
  j["rejected"] = s.rejected;
  j["measured"] = s.measured;
  j["warmup_fraction"] = s.warmup_fraction;
  j["mean_delay_s"] = s.mean_delay;
  j["max_delay_s"] = s.max_delay;
  j["p50_delay_s"] = s.p50_delay;
  j["p90_delay_s"] = s.p90_delay;
  j["p99_delay_s"] = s.p99_delay;
  j["mean_wait_s"] = s.mean_wait;
  j["mean_batch_size"] = s.mean_batch_size;
  j["mean_num_paths"] = s.mean_num_paths;
  j["makespan_s"] = s.makespan;
  j["window_mean_delay_s"] = s.window_means;
  j["saturated"] = s.saturated;
  return j;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string path_line(const Network& net, const PathRate& p) {
  std::string line = net.node_name(net.arc(p.arcs.front()).from);
  for (int a : p.arcs) line += " " + net.node_name(net.arc(a).to);
  return line + " " + fmt(p.rate);
}

std::string path_dump(const Network& net, std::span<const Reservation> reservations) {
  std::string out;
  std::vector<double> dense(net.num_arcs());
  for (const Reservation& r : reservations) {
    out += "job " + std::to_string(r.job_id) + " " + net.node_name(r.source) + " " +
           net.node_name(r.destination) + "\n";
    for (const PlanInterval& iv : r.plan) {
      out += "interval " + fmt(iv.begin) + " " + fmt(iv.end) + "\n";
      std::fill(dense.begin(), dense.end(), 0.0);
      for (const auto& [a, x] : iv.arc_rates) dense[a] = x;
      for (const PathRate& p : decompose(net, dense, r.source, r.destination, 0).paths)
        out += path_line(net, p) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void add_topology(CLI::App* app, Options& o) {
  app->add_option("--topology", o.topology,
                  "Generator: clique:N, ring:N, star:N, netcut:M, line:N, lambdarail "
                  "(optional :<capacity><unit>)");
  app->add_option("--topology-file", o.topology_file, "Topology file");
}

void add_workload(CLI::App* app, Options& o) {
  app->add_option("--dist", o.dist, "File sizes: pareto, exponential or constant")
      ->capture_default_str();
  app->add_option("--mean-tb", o.mean_tb, "Exponential mean or constant size (TB)")
      ->capture_default_str();
  app->add_option("--pareto-beta", o.beta, "Pareto shape")->capture_default_str();
  app->add_option("--pareto-xm-tb", o.xm_tb, "Pareto scale (TB)")->capture_default_str();
  app->add_option("--pareto-gamma-tb", o.gamma_tb, "Pareto shift (TB)")->capture_default_str();
  app->add_option("--requests", o.requests, "Number of requests")->capture_default_str();
  app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app->add_option("--trace", o.trace_file, "Replay a trace CSV instead of generating one");
}

int cmd_topo(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  emit(o.out_file, config_line(app) + serialize_topology(net), out);
  return kExitOk;
}

int cmd_trace(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  emit(o.out_file, config_line(app) + trace_to_csv(net, generate_trace(workload(o, o.rate), net)),
       out);
  return kExitOk;
}

int cmd_run(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  const SchedulerConfig config = scheduler_config(o.scheduler, o.k);
  if (!(o.warmup >= 0.0 && o.warmup < 1.0)) throw UsageError("--warmup must be in [0, 1)");
  std::vector<Job> trace = load_trace(o, net, o.rate);
  RunOptions options;
  options.warmup_fraction = o.warmup;
  options.keep_plans = !o.paths_file.empty();
  options.check_capacity = !o.no_check;
  RunResult result = run(net, config, trace, options);
  if (!o.log_file.empty()) write_file(o.log_file, config_line(app) + log_to_csv(net, result.log));
  if (!o.paths_file.empty()) write_file(o.paths_file, config_line(app) + path_dump(net, result.reservations));
  ordered_json doc;
  doc["config"] = effective_config(app);
  doc["summary"] = summary_json(result.summary);
  doc["rejected_job_ids"] = result.rejected;
  emit(o.summary_file, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_sweep(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  std::vector<double> loads;
  for (const std::string& item : split_list(o.loads)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v > 0.0)) throw UsageError("bad load '" + item + "'");
    loads.push_back(v);
  }
  if (loads.empty()) throw UsageError("--loads must list at least one load");
  if (!o.trace_file.empty()) throw UsageError("sweep generates its own traces; drop --trace");
  std::vector<SchedulerConfig> configs;
  for (const std::string& name : split_list(o.schedulers.empty() ? o.scheduler : o.schedulers))
    configs.push_back(scheduler_config(name, o.k));
  if (configs.empty()) throw UsageError("no scheduler given");
  if (o.jobs < 1) throw UsageError("--jobs must be >= 1");
  for (double load : loads) workload(o, load);

  struct Task {
    double load;
    SchedulerConfig config;
  };
  std::vector<Task> tasks;
  for (double load : loads)
    for (const SchedulerConfig& c : configs) tasks.push_back(Task{load, c});
  std::vector<SweepRun> runs(tasks.size());
  RunOptions options;
  options.warmup_fraction = o.warmup;
  options.check_capacity = !o.no_check;
  auto work = [&](std::size_t i) {
    std::vector<Job> trace = generate_trace(workload(o, tasks[i].load), net);
    runs[i] = SweepRun{tasks[i].load, run(net, tasks[i].config, trace, options).summary};
  };
  for (std::size_t b = 0; b < tasks.size(); b += static_cast<std::size_t>(o.jobs)) {
    std::vector<std::future<void>> pending;
    const std::size_t e = std::min(tasks.size(), b + static_cast<std::size_t>(o.jobs));
    for (std::size_t i = b; i < e; ++i) pending.push_back(std::async(std::launch::async, work, i));
    for (auto& f : pending) f.get();
  }
  std::vector<LoadPoint> points = sweep_aggregate(runs);
  emit(o.out_file, config_line(app) + load_points_csv(points), out);
  if (!o.summary_file.empty()) {
    ordered_json doc;
    doc["config"] = effective_config(app);
    doc["runs"] = ordered_json::array();
    for (const SweepRun& r : runs) {
      ordered_json row = summary_json(r.summary);
      row["load_req_per_hour"] = r.load;
      doc["runs"].push_back(row);
    }
    write_file(o.summary_file, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_bound(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  if (!(o.mean_tb > 0.0)) throw UsageError("--mean-tb must be > 0");
  double bound = 0.0;
  try {
    bound = fluid_bound(net, o.mean_tb * kBitsPerTerabyte);
  } catch (const DisconnectedPairError& e) {
    throw UsageError(std::string("fluid bound undefined: ") + e.what());
  }
  ordered_json doc;
  doc["config"] = effective_config(app);
  doc["topology_id"] = topology_id(net);
  doc["mean_size_bits"] = o.mean_tb * kBitsPerTerabyte;
  doc["fluid_bound_req_per_hour"] = bound;
  emit(o.out_file, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_decompose(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  auto s = net.find_node(o.src);
  auto d = net.find_node(o.dst);
  if (!s || !d) throw UsageError("unknown --src or --dst node");
  if (*s == *d) throw UsageError("--src and --dst must differ");
  if ((o.k > 0) == (o.alpha > 0.0)) throw UsageError("give exactly one of --k and --alpha");
  const int k = o.k > 0 ? o.k : path_budget(o.alpha, net.num_arcs());
  MaxFlowResult flow = max_flow(net, *s, *d);
  if (flow.value <= 0.0) throw UsageError("no flow between the given nodes");
  PathSet ps = decompose(net, flow.arc_flow, *s, *d, k);
  std::string text = config_line(app) + "# " + o.src + " -> " + o.dst + " max_flow_bps " + fmt(flow.value) +
                     " arcs " + std::to_string(net.num_arcs()) + " k " + std::to_string(k) +
                     "\n";
  for (const PathRate& p : ps.paths) text += path_line(net, p) + "\n";
  text += "achieved_fraction " + fmt(ps.achieved / ps.total) + "\n";
  text += "guaranteed_fraction " + fmt(dispersion_guarantee(k, net.num_arcs())) + "\n";
  emit(o.out_file, text, out);
  return kExitOk;
}

int cmd_verify(const CLI::App& app, const Options& o, std::ostream& out) {
  Network net = load_network(o);
  const SchedulerConfig config = scheduler_config(o.scheduler, o.k);
  if (config.kind != SchedulerKind::kBatchAll && config.kind != SchedulerKind::kBatchLim)
    throw UsageError("verify needs --scheduler batchall or batchlim");
  if (!(o.eps > 0.0)) throw UsageError("--eps must be > 0");
  std::vector<Job> trace = load_trace(o, net, o.rate);
  CompetitiveReport rep = verify_competitive(net, trace, o.eps, config);
  const Network augmented = net.scaled(1.0 + o.eps);
  std::string problems = check_no_oversubscription(augmented, rep.reservations);
  for (const Reservation& r : rep.reservations)
    if (problems.empty()) problems = check_reservation(augmented, r);
  bool slot_rules_ok = true;
  for (const SlotCreation& c : rep.creations) {
    const double len = c.end - c.begin;
    slot_rules_ok &= len >= (c.end - c.arrival) / 2 * (1 - 1e-12);
    if (c.previous_length)
      slot_rules_ok &= len <= std::max(2 * *c.previous_length, c.min_time) * (1 + 1e-12);
  }
  ordered_json doc;
  doc["config"] = effective_config(app);
  doc["scheduler"] = scheduler_name(config);
  doc["jobs"] = trace.size();
  doc["max_delay_s"] = rep.max_delay;
  doc["optimal_delay_lower_bound_s"] = rep.lower_bound;
  doc["ratio"] = rep.ratio;
  doc["ratio_bound"] = rep.bound;
  doc["ratio_ok"] = rep.ok;
  doc["slot_rules_ok"] = slot_rules_ok;
  doc["invariant_problem"] = problems;
  emit(o.out_file, doc.dump(2) + "\n", out);
  return rep.ok && slot_rules_ok && problems.empty() ? kExitOk : kExitInvariant;
}

// Turns a JSON object into command-line arguments placed before the user's
// own, so explicit flags win.
std::vector<std::string> config_args(const std::string& path) {
  ordered_json cfg;
  try {
    cfg = ordered_json::parse(read_file(path));
  } catch (const ordered_json::exception& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config '" + path + "' must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ",";
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      args.push_back(flag);
      args.push_back(joined);
    } else {
      throw UsageError("config key '" + key + "' has an unsupported type");
    }
  }
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Advance-reservation scheduling for bulk transfers", "bulkres"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with default option values");
  };

  CLI::App* topo_cmd = app.add_subcommand("topo", "Print a topology in canonical form");
  add_topology(topo_cmd, o);
  topo_cmd->add_option("--out", o.out_file, "Output file");
  add_config(topo_cmd);

  CLI::App* trace_cmd = app.add_subcommand("trace", "Generate a workload trace CSV");
  add_topology(trace_cmd, o);
  add_workload(trace_cmd, o);
  trace_cmd->add_option("--rate", o.rate, "Arrival rate (requests/hour)")->capture_default_str();
  trace_cmd->add_option("--out", o.out_file, "Output file");
  add_config(trace_cmd);

  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scheduler on one workload");
  add_topology(run_cmd, o);
  add_workload(run_cmd, o);
  run_cmd->add_option("--scheduler", o.scheduler,
                      "greedy, greedy-shortest, batchall, batchlim, batchall-disp, "
                      "batchlim-disp (or name:k)")
      ->capture_default_str();
  run_cmd->add_option("--k", o.k, "Path budget for the -disp schedulers")->capture_default_str();
  run_cmd->add_option("--rate", o.rate, "Arrival rate (requests/hour)")->capture_default_str();
  run_cmd->add_option("--warmup", o.warmup, "Leading share of completions left out")
      ->capture_default_str();
  run_cmd->add_flag("--no-check", o.no_check, "Skip the final capacity sweep");
  run_cmd->add_option("--log", o.log_file, "Reservation log CSV");
  run_cmd->add_option("--summary", o.summary_file, "Summary JSON (default: stdout)");
  run_cmd->add_option("--paths", o.paths_file, "Per-job path dump");
  add_config(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run schedulers over a list of loads");
  add_topology(sweep_cmd, o);
  add_workload(sweep_cmd, o);
  sweep_cmd->add_option("--schedulers", o.schedulers, "Comma-separated scheduler names");
  sweep_cmd->add_option("--scheduler", o.scheduler, "Single scheduler name")
      ->capture_default_str();
  sweep_cmd->add_option("--k", o.k, "Path budget for the -disp schedulers")->capture_default_str();
  sweep_cmd->add_option("--loads", o.loads, "Comma-separated loads (requests/hour)");
  sweep_cmd->add_option("--warmup", o.warmup, "Leading share of completions left out")
      ->capture_default_str();
  sweep_cmd->add_flag("--no-check", o.no_check, "Skip the per-run capacity sweep");
  sweep_cmd->add_option("--jobs", o.jobs, "Runs executed concurrently")->capture_default_str();
  sweep_cmd->add_option("--out", o.out_file, "Load-point CSV (default: stdout)");
  sweep_cmd->add_option("--summary", o.summary_file, "Per-run summaries JSON");
  add_config(sweep_cmd);

  CLI::App* bound_cmd = app.add_subcommand("bound", "Fluid bound on sustainable load");
  add_topology(bound_cmd, o);
  bound_cmd->add_option("--mean-tb", o.mean_tb, "Mean file size (TB)")->capture_default_str();
  bound_cmd->add_option("--out", o.out_file, "Output file");
  add_config(bound_cmd);

  CLI::App* dec_cmd = app.add_subcommand("decompose", "Widest-path decomposition of a max flow");
  add_topology(dec_cmd, o);
  dec_cmd->add_option("--src", o.src, "Source node name")->required();
  dec_cmd->add_option("--dst", o.dst, "Destination node name")->required();
  dec_cmd->add_option("--k", o.k, "Path budget");
  dec_cmd->add_option("--alpha", o.alpha, "Path budget as a fraction of the arc count");
  dec_cmd->add_option("--out", o.out_file, "Output file");
  add_config(dec_cmd);

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Check a batching scheduler's competitive ratio and invariants");
  add_topology(verify_cmd, o);
  add_workload(verify_cmd, o);
  verify_cmd->add_option("--scheduler", o.scheduler, "batchall or batchlim (or -disp forms)")
      ->capture_default_str();
  verify_cmd->add_option("--k", o.k, "Path budget for the -disp schedulers")
      ->capture_default_str();
  verify_cmd->add_option("--rate", o.rate, "Arrival rate (requests/hour)")->capture_default_str();
  verify_cmd->add_option("--eps", o.eps, "Capacity augmentation")->capture_default_str();
  verify_cmd->add_option("--out", o.out_file, "Report JSON (default: stdout)");
  add_config(verify_cmd);

  try {
    // Expand --config before parsing so explicit flags override it.
    std::vector<std::string> args = raw_args;
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::string path;
      std::size_t erase = 0;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
        erase = 2;
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        erase = 1;
      }
      if (erase == 0) continue;
      auto extra = config_args(path);
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i + erase));
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (*topo_cmd) return cmd_topo(*topo_cmd, o, out);
    if (*trace_cmd) return cmd_trace(*trace_cmd, o, out);
    if (*run_cmd) return cmd_run(*run_cmd, o, out);
    if (*sweep_cmd) return cmd_sweep(*sweep_cmd, o, out);
    if (*bound_cmd) return cmd_bound(*bound_cmd, o, out);
    if (*dec_cmd) return cmd_decompose(*dec_cmd, o, out);
    if (*verify_cmd) return cmd_verify(*verify_cmd, o, out);
    return kExitUsage;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const DisconnectedPairError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace bulkres::cli
