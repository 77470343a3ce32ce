#include "risuav/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "risuav/orchestrator.hpp"
#include "risuav/scenario.hpp"
#include "risuav/scheduling.hpp"

namespace risuav {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunSpec {
  std::string config;
  std::string mode = "joint";
  std::optional<std::uint64_t> seed;
  std::optional<int> timeblocks;
  std::string out;
  std::string axis;
  std::vector<double> values;
  bool quiet = false;
  int threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  bool wall_clock = false;
  int instances = 50;
};

class Log {
 public:
  Log(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}
  void info(const std::string& msg) const {
    if (quiet_) return;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    err_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << msg << '\n';
  }
  void error(const std::string& msg) const { err_ << "risuav: " << msg << '\n'; }

 private:
  std::ostream& err_;
  bool quiet_;
};

// Flag overrides go through the config parser so derived fields (user placement) follow the seed.
NetworkScenario load_with_overrides(const RunSpec& req) {
  json root = json::object();
  if (!req.config.empty()) {
    std::ifstream in(req.config);
    if (!in) throw ConfigError("cannot open config file: " + req.config);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      try {
        root = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError(req.config + ": config parse error: " + e.what());
      }
    }
  }
  if (!root.is_object()) throw ConfigError(req.config + ": config root must be an object");
  if (req.seed) root["experiment"]["seed"] = *req.seed;
  if (req.timeblocks) root["experiment"]["timeblocks"] = *req.timeblocks;
  try {
    return load_scenario(root.dump());
  } catch (const ConfigError& e) {
    if (req.config.empty()) throw;
    throw ConfigError(req.config + ": " + e.what());
  }
}

void emit(const RunSpec& req, const std::string& csv, std::ostream& out) {
  if (req.out.empty() || req.out == "-") {
    out << csv;
    out.flush();
  } else {
    write_file_atomic(req.out, csv);
  }
}

void check_output_dir(const RunSpec& req) {
  if (req.out.empty() || req.out == "-") return;
  const fs::path dir = fs::absolute(fs::path(req.out)).parent_path();
  if (!fs::is_directory(dir)) throw ConfigError("output directory does not exist: " + dir.string());
}

OrchestratorOptions options_from(const RunSpec& req) {
  OrchestratorOptions opt;
  opt.wall_clock = req.wall_clock;
  opt.threads = req.threads;
  return opt;
}

std::string describe(const TimeblockResult& r) {
  std::ostringstream s;
  s << mode_name(r.mode) << " timeblock " << r.timeblock << ": sum_rate " << std::setprecision(6) << r.sum_rate
    << " min_rate " << r.min_rate << " iterations " << r.iterations << (r.feasible ? "" : " INFEASIBLE");
  return s.str();
}

int report_infeasible(const std::vector<const TimeblockResult*>& bad, const Log& log) {
  if (bad.empty()) return exit_ok;
  const TimeblockResult& r = *bad.front();
  std::ostringstream msg;
  msg << "infeasible: " << bad.size() << " timeblock(s) miss the minimum rate; first is timeblock " << r.timeblock
      << " (user " << r.failing_user << ")";
  log.error(msg.str());
  return exit_infeasible;
}

int cmd_run(const RunSpec& req, std::ostream& out, const Log& log) {
  const NetworkScenario s = load_with_overrides(req);
  const Mode mode = parse_mode(req.mode);
  check_output_dir(req);
  log.info("run mode=" + mode_name(mode) + " seed=" + std::to_string(s.seed) +
           " timeblocks=" + std::to_string(s.timeblocks));
  const auto results = run_experiment(s, mode, s.timeblocks, options_from(req), {},
                                      [&](const TimeblockResult& r) { log.info(describe(r)); });
  std::ostringstream csv;
  write_results_csv(csv, results);
  emit(req, csv.str(), out);
  std::ostringstream summary;
  summary << "mean sum_rate " << std::setprecision(6) << mean_sum_rate(results);
  log.info(summary.str());
  std::vector<const TimeblockResult*> bad;
  for (const auto& r : results) {
    if (!r.feasible) bad.push_back(&r);
  }
  return report_infeasible(bad, log);
}

int cmd_sweep(const RunSpec& req, std::ostream& out, const Log& log) {
  const NetworkScenario s = load_with_overrides(req);
  const Mode mode = parse_mode(req.mode);
  if (req.axis.empty()) throw ConfigError("sweep requires --axis");
  const SweepAxis axis = parse_axis(req.axis);
  if (req.values.empty()) throw ConfigError("sweep requires --values");
  check_output_dir(req);
  std::vector<SweepGroup> groups;
  for (double v : req.values) {
    const NetworkScenario sv = apply_axis(s, axis, v);
    std::ostringstream head;
    head << "sweep " << axis_name(axis) << "=" << v << " mode=" << mode_name(mode);
    log.info(head.str());
    groups.push_back({axis, v,
                      run_experiment(sv, mode, sv.timeblocks, options_from(req), {},
                                     [&](const TimeblockResult& r) { log.info(describe(r)); })});
    std::ostringstream mean;
    mean << "mean sum_rate " << std::setprecision(6) << mean_sum_rate(groups.back().results);
    log.info(mean.str());
  }
  std::ostringstream csv;
  write_sweep_csv(csv, groups);
  emit(req, csv.str(), out);
  std::vector<const TimeblockResult*> bad;
  for (const auto& g : groups) {
    for (const auto& r : g.results) {
      if (!r.feasible) bad.push_back(&r);
    }
  }
  return report_infeasible(bad, log);
}

int cmd_oracle(const RunSpec& req, std::ostream& out, const Log& log) {
  if (req.instances < 1) throw ConfigError("--instances must be >= 1");
  const OracleReport rep = oracle_check(req.instances, req.seed.value_or(1));
  for (const auto& f : rep.failures) log.error(f);
  out << "oracle-check instances=" << rep.instances << " mismatches=" << rep.mismatches
      << " max_gap=" << std::setprecision(3) << rep.max_gap << " seconds=" << std::fixed << std::setprecision(2)
      << rep.seconds << '\n';
  return rep.mismatches == 0 ? exit_ok : exit_failure;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write output file: " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot move output into place: " + path + ": " + ec.message());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunSpec req;
  CLI::App app{"Simulator and optimizer for RIS-assisted mmWave multi-UAV networks", "risuav"};
  app.require_subcommand(1);

  auto common = [&req](CLI::App* sub) {
    sub->add_option("--config", req.config, "JSON scenario file (defaults when omitted)");
    sub->add_option("--mode", req.mode, "joint | fixed-sched | no-beam-ris | no-deploy | random | no-ris");
    sub->add_option("--seed", req.seed, "experiment seed (default 1)");
    sub->add_option("--timeblocks", req.timeblocks, "number of timeblocks (default 1000)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", req.out, "CSV path (stdout when omitted)");
    sub->add_flag("--quiet", req.quiet, "suppress the run log");
    sub->add_option("--threads", req.threads, "worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--wall-clock", req.wall_clock, "record per-timeblock wall time in the CSV");
  };
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  common(run);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "re-run the experiment over one parameter axis");
  common(sweep_cmd);
  sweep_cmd->add_option("--axis", req.axis, "num_ris | step_d | altitude | power");
  sweep_cmd->add_option("--values", req.values, "comma-separated axis values")->delimiter(',');
  CLI::App* oracle = app.add_subcommand("oracle-check", "compare sBnB with exhaustive search");
  oracle->add_option("--instances", req.instances, "random instances (default 50)");
  oracle->add_option("--seed", req.seed, "instance seed (default 1)");
  oracle->add_flag("--quiet", req.quiet, "suppress the run log");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "risuav: " << e.what() << '\n';
    return exit_config;
  }

  const Log log(err, req.quiet);
  try {
    if (run->parsed()) return cmd_run(req, out, log);
    if (sweep_cmd->parsed()) return cmd_sweep(req, out, log);
    return cmd_oracle(req, out, log);
  } catch (const ConfigError& e) {
    log.error(std::string("config error: ") + e.what());
    return exit_config;
  } catch (const std::invalid_argument& e) {
    log.error(std::string("config error: ") + e.what());
    return exit_config;
  } catch (const InfeasibleError& e) {
    log.error(std::string("infeasible: ") + e.what());
    return exit_infeasible;
  } catch (const std::exception& e) {
    log.error(e.what());
    return exit_failure;
  }
}

}  // namespace risuav
