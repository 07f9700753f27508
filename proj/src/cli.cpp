#include "echoverify/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "echoverify/checker.hpp"
#include "echoverify/json_io.hpp"
#include "echoverify/service.hpp"
#include "echoverify/trace_text.hpp"

namespace echoverify {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Config> read_configs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<Config> configs;
  try {
    configs = parse_config_file(buf.str());
  } catch (const std::exception& err) {
    throw UsageError(path + ": " + err.what());
  }
  if (configs.empty()) throw UsageError(path + ": no configuration found");
  for (const Config& c : configs) {
    if (!is_valid_config(c)) {
      throw UsageError(path + ": `" + format_config_line(c) +
                       "` violates the network assumptions (self loop, asymmetry or "
                       "unreachable node)");
    }
  }
  return configs;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
}

Variant variant_of(const std::string& s) { return *parse_variant(s); }

CheckOptions check_options(std::optional<std::size_t> budget, const std::string& symmetry) {
  return CheckOptions{budget, symmetry == "on"};
}

void print_report_text(std::ostream& out, const SweepReport& r, bool timing) {
  out << "check " << to_string(r.property) << " (variant " << to_string(r.variant)
      << ") over " << r.results.size() << " configuration"
      << (r.results.size() == 1 ? "" : "s") << "\n";
  for (const SweepEntry& e : r.results) {
    const Verdict& v = e.verdict;
    if (v.outcome == Outcome::Pass) continue;
    out << to_string(v.outcome) << "  " << format_config_line(e.config);
    if (v.reason) out << "  " << to_string(*v.reason);
    if (v.witness) out << "  witness " << v.witness->states.size() << " states";
    if (!v.note.empty()) out << "  (" << v.note << ")";
    out << "\n";
  }
  const std::size_t bad = r.violations();
  const std::size_t open = r.inconclusive();
  out << "result: " << bad << " violation" << (bad == 1 ? "" : "s") << ", " << open
      << " inconclusive, " << r.results.size() - bad - open << " pass\n";
  const ExploreStats total = r.totals();
  out << "explored: " << total.states << " states, " << total.transitions
      << " transitions\n";
  if (timing) out << "time: " << total.elapsed.count() << " ms\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explicit-state verifier for the Echo spanning-tree protocol", "echoverify"};
  app.require_subcommand(1, 1);

  const std::vector<std::string> variants = {"chang", "fixed"};
  const std::vector<std::string> on_off = {"on", "off"};
  const std::vector<std::string> formats = {"text", "json"};

  // count
  auto* count = app.add_subcommand("count", "Count valid configurations over a universe");
  int universe = 0;
  std::string column = "labeled";
  count->add_option("--universe", universe, "Number of node identifiers")->required();
  count->add_option("--column", column, "labeled or canonical")
      ->check(CLI::IsMember({"labeled", "canonical"}));

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "List canonical configurations");
  int enum_max = 0;
  std::string enum_format = "text";
  std::string enum_out;
  enumerate->add_option("--max-nodes", enum_max)->required();
  enumerate->add_option("--format", enum_format)->check(CLI::IsMember(formats));
  enumerate->add_option("--out", enum_out, "Also write the listing to this file");

  // check
  auto* check = app.add_subcommand("check", "Check a property over configurations");
  std::string property;
  std::string check_variant = "fixed";
  int check_max = 0;
  std::string check_config;
  std::string check_format = "text";
  std::string check_out;
  std::optional<std::size_t> check_budget;
  std::string check_symmetry = "off";
  bool check_no_timing = false;
  check->add_option("--property", property)
      ->required()
      ->check(CLI::IsMember({"correctness", "termination"}));
  check->add_option("--variant", check_variant)->check(CLI::IsMember(variants));
  auto* max_opt = check->add_option("--max-nodes", check_max, "Sweep all canonical configs");
  auto* cfg_opt = check->add_option("--config", check_config, "Config file to check");
  max_opt->excludes(cfg_opt);
  check->add_option("--format", check_format)->check(CLI::IsMember(formats));
  check->add_option("--out", check_out, "Write the JSON report to this file");
  check->add_option("--state-budget", check_budget, "Maximum stored states per config");
  check->add_option("--symmetry", check_symmetry)->check(CLI::IsMember(on_off));
  check->add_flag("--no-timing", check_no_timing, "Zero all timings for golden output");

  // run
  auto* run = app.add_subcommand("run", "Print a shortest trace reaching a target");
  std::string run_config;
  std::string run_variant = "fixed";
  std::string run_target = "finish";
  std::optional<std::size_t> run_max_steps;
  std::optional<std::size_t> run_budget;
  std::string run_symmetry = "off";
  std::string run_format = "text";
  std::string run_out;
  bool run_no_timing = false;
  run->add_option("--config", run_config)->required();
  run->add_option("--variant", run_variant)->check(CLI::IsMember(variants));
  run->add_option("--target", run_target)
      ->check(CLI::IsMember({"finish", "finish-not-spanning-tree"}));
  run->add_option("--max-steps", run_max_steps, "Maximum number of events");
  run->add_option("--state-budget", run_budget);
  run->add_option("--symmetry", run_symmetry)->check(CLI::IsMember(on_off));
  run->add_option("--format", run_format)->check(CLI::IsMember(formats));
  run->add_option("--out", run_out, "Write the JSON trace to this file");
  run->add_flag("--no-timing", run_no_timing, "Accepted for symmetry with check");

  // serve
  auto* serve = app.add_subcommand("serve", "Start the trace exploration service");
  int port = 8080;
  std::string static_dir;
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve->add_option("--static", static_dir, "Directory of UI assets")->check(CLI::ExistingDirectory);

  std::vector<const char*> argv = {"echoverify"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*count) {
      if (universe < 1 || universe > kMaxNodes) {
        throw UsageError("--universe must be within 1.." + std::to_string(kMaxNodes));
      }
      out << (column == "labeled" ? count_labeled(universe)
                                  : enumerate_canonical(universe).size())
          << "\n";
      return kExitOk;
    }

    if (*enumerate) {
      if (enum_max < 1 || enum_max > kMaxEnumerateNodes) {
        throw UsageError("--max-nodes must be within 1.." + std::to_string(kMaxEnumerateNodes));
      }
      std::ostringstream listing;
      const std::vector<Config> configs = enumerate_canonical(enum_max);
      if (enum_format == "json") {
        Json list = Json::array();
        for (const Config& c : configs) list.push_back(config_to_json(c));
        listing << list.dump(2) << "\n";
      } else {
        for (const Config& c : configs) listing << format_config_line(c) << "\n";
      }
      out << listing.str();
      if (!enum_out.empty()) write_file(enum_out, listing.str());
      return kExitOk;
    }

    if (*check) {
      const CheckOptions opt = check_options(check_budget, check_symmetry);
      SweepReport report;
      if (!check_config.empty()) {
        const std::vector<Config> configs = read_configs(check_config);
        report = check_all(configs, variant_of(check_variant), *parse_property(property), opt);
      } else {
        if (check_max < 1 || check_max > kMaxSweepNodes) {
          throw UsageError("--max-nodes (1.." + std::to_string(kMaxSweepNodes) +
                           ") or --config is required");
        }
        report = sweep(check_max, variant_of(check_variant), *parse_property(property), opt);
      }
      const bool timing = !check_no_timing;
      const std::string json = report_to_json(report, timing).dump(2) + "\n";
      if (check_format == "json") {
        out << json;
      } else {
        print_report_text(out, report, timing);
      }
      if (!check_out.empty()) write_file(check_out, json);
      if (report.violations() > 0) return kExitViolation;
      return report.inconclusive() > 0 ? kExitResource : kExitOk;
    }

    if (*run) {
      const std::vector<Config> configs = read_configs(run_config);
      if (configs.size() != 1) throw UsageError("run expects exactly one configuration");
      const std::optional<Trace> trace =
          shortest_trace_to(configs.front(), variant_of(run_variant), *parse_target(run_target),
                            check_options(run_budget, run_symmetry), run_max_steps);
      if (!trace) {
        out << "no state satisfying " << run_target << " is reachable";
        if (run_max_steps) out << " within " << *run_max_steps << " steps";
        out << "\n";
        return kExitViolation;
      }
      const std::string json = trace_to_json(*trace).dump(2) + "\n";
      out << (run_format == "json" ? json : format_trace_text(*trace));
      if (!run_out.empty()) write_file(run_out, json);
      return kExitOk;
    }

    if (*serve) {
      httplib::Server server;
      ExploreService service;
      mount_routes(server, service, static_dir);
      out << "listening on http://0.0.0.0:" << port << std::endl;
      if (!server.listen("0.0.0.0", port)) {
        err << "cannot listen on port " << port << "\n";
        return kExitUsage;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << " (" << e.partial().states << " states, "
        << e.partial().transitions << " transitions explored)\n";
    return kExitResource;
  }
  return kExitUsage;
}

}  // namespace echoverify
