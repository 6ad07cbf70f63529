#include "stochmatch/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stochmatch/estimators.hpp"
#include "stochmatch/exact_dp.hpp"
#include "stochmatch/policies.hpp"
#include "stochmatch/sampling.hpp"
#include "stochmatch/scenario.hpp"

namespace stochmatch::cli {

namespace {

using nlohmann::json;

std::uint64_t enumeration_cap_from_env() {
  const char* value = std::getenv("STOCHMATCH_MAX_ENUM");
  if (value == nullptr || *value == '\0') return kDefaultEnumerationCap;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value, &end, 10);
  if (end == value || *end != '\0' || parsed == 0) {
    throw ModelError("STOCHMATCH_MAX_ENUM must be a positive integer");
  }
  return parsed;
}

json trace_to_json(const PolicyTrace& trace) {
  json steps = json::array();
  for (const PolicyTraceStep& step : trace.steps) {
    json js;
    js["t"] = step.t;
    js["arrivals"] = step.arrivals;
    js["matched"] = json::array();
    for (Edge e : step.decision) {
      js["matched"].push_back(json::array({e.first, e.second}));
    }
    js["deaths"] = step.deaths;
    steps.push_back(std::move(js));
  }
  json out;
  out["steps"] = std::move(steps);
  out["size"] = trace.final_matching.size();
  return out;
}

struct OptArgs {
  std::string source;
  bool exact = false;
  bool rational = false;
  std::vector<double> fpras;  // epsilon delta
  std::optional<std::uint64_t> k;
  bool paper_k = false;
  std::optional<int> runs;
  std::uint64_t seed = 0;
  bool serial = false;
};

int cmd_opt(const OptArgs& args, std::uint64_t cap, std::ostream& out) {
  const StochasticModel model = resolve_model(args.source);
  json detail;
  detail["command"] = "opt";
  detail["source"] = args.source;
  detail["n"] = model.vertex_count();

  if (args.exact == !args.fpras.empty()) {
    // exactly one of --exact / --fpras
    throw ModelError("choose exactly one of --exact or --fpras EPS DELTA");
  }
  if (args.exact) {
    detail["method"] = "exact";
    if (args.rational) {
      const Rational value = exact_opt_rational(model, cap);
      out << to_string(value) << "\n";
      detail["value"] = to_string(value);
      detail["value_double"] = to_double(value);
    } else {
      const double value = exact_opt(model, cap);
      out << format_significant(value) << "\n";
      detail["value"] = value;
    }
  } else {
    if (!args.k && !args.paper_k) {
      throw ModelError(
          "--fpras needs --k K or an explicit --paper-k (the default sample "
          "count n^4/eps^2 is usually enormous)");
    }
    EstimatorConfig cfg;
    cfg.epsilon = args.fpras[0];
    cfg.delta = args.fpras[1];
    cfg.sample_override = args.k;
    cfg.runs_override = args.runs;
    cfg.seed = args.seed;
    cfg.parallel = !args.serial;
    const Estimate estimate = estimate_opt(model, cfg);
    out << format_significant(estimate.value) << "\n";
    detail["method"] = "fpras";
    detail["epsilon"] = cfg.epsilon;
    detail["delta"] = cfg.delta;
    detail["seed"] = cfg.seed;
    detail["value"] = estimate.value;
    detail["runs"] = estimate.runs;
    detail["samples_used"] = estimate.samples_used;
    detail["degenerate_zero"] = estimate.degenerate_zero;
    detail["degenerate_q"] = estimate.degenerate_q;
    detail["max_run_stddev"] = estimate.max_run_stddev;
    detail["warnings"] = estimate.warnings;
  }
  out << detail.dump(2) << "\n";
  return kExitOk;
}

struct ChiStarArgs {
  std::string source;
  bool rational = false;
  std::string export_table;
};

int cmd_chi_star(const ChiStarArgs& args, std::ostream& out) {
  const StochasticModel model = resolve_model(args.source);
  if (args.rational && args.export_table.empty()) {
    out << to_string(chi_star_rational(model)) << "\n";
    return kExitOk;
  }
  const ChiStarResult result = chi_star(model);
  if (args.rational) {
    out << to_string(chi_star_rational(model)) << "\n";
  } else {
    out << format_significant(result.value) << "\n";
  }
  if (!args.export_table.empty()) {
    json doc;
    doc["states"] = json::array();
    result.table.for_each_sorted(
        [&](int t, std::uint64_t mask, const DPTable::Entry& entry) {
          json state;
          state["t"] = t;
          state["alive"] = alive_from_mask(mask);
          state["value"] = entry.value;
          state["decision"] = json::array();
          for (Edge e : entry.decision) {
            state["decision"].push_back(json::array({e.first, e.second}));
          }
          doc["states"].push_back(std::move(state));
        });
    std::ofstream file(args.export_table, std::ios::binary);
    if (!file) {
      throw ModelError("cannot write table export: " + args.export_table);
    }
    file << doc.dump(2) << "\n";
    out << "table: " << result.table.state_count() << " states -> "
        << args.export_table << "\n";
  }
  return kExitOk;
}

struct RunArgs {
  std::string source;
  std::string policy;
  std::optional<std::uint64_t> samples;
  bool exact = false;
  std::uint64_t seed = 0;
  bool trace = false;
  bool serial = false;
  double policy_epsilon = 0.25;
  double policy_delta = 0.25;
  std::uint64_t policy_k = 2000;
  int policy_runs = 1;
};

int cmd_run(const RunArgs& args, std::uint64_t cap, std::ostream& out) {
  const StochasticModel model = resolve_model(args.source);
  if (args.exact == args.samples.has_value()) {
    throw ModelError("choose exactly one of --exact or --samples N");
  }
  EstimatorConfig policy_cfg;
  policy_cfg.epsilon = args.policy_epsilon;
  policy_cfg.delta = args.policy_delta;
  policy_cfg.sample_override = args.policy_k;
  policy_cfg.runs_override = args.policy_runs;
  policy_cfg.parallel = !args.serial;
  const std::unique_ptr<Policy> policy =
      make_policy_by_name(args.policy, model, policy_cfg);

  json detail;
  detail["command"] = "run";
  detail["source"] = args.source;
  detail["policy"] = policy->name();

  double value = 0.0;
  if (args.exact) {
    if (policy->is_deterministic()) {
      value = evaluate_policy_exact(model, *policy, cap);
    } else {
      const std::uint64_t seeds[] = {args.seed};
      value = evaluate_policy_exact_averaged(model, *policy, seeds, cap);
      detail["policy_seed"] = args.seed;
    }
    detail["method"] = "exact";
  } else {
    value = evaluate_policy_mc(model, *policy, *args.samples, args.seed,
                               !args.serial);
    detail["method"] = "monte-carlo";
    detail["samples"] = *args.samples;
    detail["seed"] = args.seed;
  }
  detail["value"] = value;

  out << format_significant(value) << "\n";
  out << detail.dump(2) << "\n";

  if (args.trace) {
    const std::uint64_t count = args.exact ? 1 : *args.samples;
    const std::uint64_t shown = std::min<std::uint64_t>(count, 10);
    for (std::uint64_t i = 0; i < shown; ++i) {
      const Instantiation inst = sample_instantiation(model, args.seed, i);
      const PolicyTrace trace =
          run_adaptive(model, *policy, inst, derive_seed(~args.seed, i));
      json line = trace_to_json(trace);
      json deaths = json::array();
      for (const VertexSpec& v : model.vertices()) {
        deaths.push_back(inst.death_of(v.id));
      }
      line["death_times"] = std::move(deaths);
      out << line.dump() << "\n";
    }
  }
  return kExitOk;
}

struct RatioArgs {
  std::string family = "sn";
  int from = 1;
  int to = 6;
  std::string out_path;
};

int cmd_ratio(const RatioArgs& args, std::ostream& out) {
  if (args.family != "sn") {
    throw ModelError("unknown family '" + args.family + "' (supported: sn)");
  }
  if (args.from < 1 || args.to < args.from) {
    throw ModelError("--from/--to must satisfy 1 <= from <= to");
  }
  std::ostringstream csv;
  csv << "n,chi_star,opt,ratio\n";
  for (int n = args.from; n <= args.to; ++n) {
    const StochasticModel model = make_sn_family(n);
    const Rational chi = chi_star_rational(model);
    const Rational opt = exact_opt_rational(model);
    const Rational ratio = chi / opt;
    csv << n << "," << format_significant(to_double(chi)) << ","
        << format_significant(to_double(opt)) << ","
        << format_significant(to_double(ratio)) << "\n";
  }
  if (args.out_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(args.out_path, std::ios::binary);
    if (!file) throw ModelError("cannot write CSV: " + args.out_path);
    file << csv.str();
    out << "wrote " << args.out_path << "\n";
  }
  return kExitOk;
}

struct SampleArgs {
  std::string source;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_sample(const SampleArgs& args, std::ostream& out) {
  const StochasticModel model = resolve_model(args.source);
  std::ostringstream lines;
  GeneralMatcher matcher;
  for (std::uint64_t i = 0; i < args.count; ++i) {
    const Instantiation inst = sample_instantiation(model, args.seed, i);
    json line;
    line["index"] = i;
    json deaths = json::array();
    for (const VertexSpec& v : model.vertices()) {
      deaths.push_back(inst.death_of(v.id));
    }
    line["death_times"] = std::move(deaths);
    line["opt"] = matcher.max_matching_size(instantiation_graph(model, inst));
    lines << line.dump() << "\n";
  }
  if (args.out_path.empty()) {
    out << lines.str();
  } else {
    std::ofstream file(args.out_path, std::ios::binary);
    if (!file) throw ModelError("cannot write samples: " + args.out_path);
    file << lines.str();
    out << "wrote " << args.out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

std::string format_significant(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return buffer;
}

StochasticModel resolve_model(const std::string& source) {
  if (source.rfind("sn:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(source.substr(3));
    } catch (const std::exception&) {
      throw ModelError("malformed generator '" + source + "'");
    }
    return make_sn_family(n);
  }
  if (source.rfind("triad:", 0) == 0) {
    try {
      return make_triad_family(rational_from_text(source.substr(6)));
    } catch (const std::invalid_argument& err) {
      throw ModelError("malformed generator '" + source + "': " + err.what());
    }
  }
  return load_scenario_file(source);
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"stochastic arrival-departure matching toolkit"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  std::string validate_source;
  validate->add_option("source", validate_source, "scenario path")->required();

  OptArgs opt_args;
  auto* opt = app.add_subcommand(
      "opt", "expected hindsight optimum, exact or estimated");
  opt->add_option("source", opt_args.source, "scenario path or generator")
      ->required();
  opt->add_flag("--exact", opt_args.exact, "full enumeration");
  opt->add_flag("--rational", opt_args.rational, "exact arithmetic output");
  opt->add_option("--fpras", opt_args.fpras, "epsilon delta")->expected(2);
  std::uint64_t opt_k = 0;
  auto* opt_k_option = opt->add_option("--k", opt_k, "samples per run");
  opt->add_flag("--paper-k", opt_args.paper_k,
                "allow the default k = n^4/eps^2");
  int opt_runs = 0;
  auto* opt_runs_option =
      opt->add_option("--runs", opt_runs, "median amplification runs");
  opt->add_option("--seed", opt_args.seed, "master seed (default 0)");
  opt->add_flag("--serial", opt_args.serial, "disable the parallel kernel");

  ChiStarArgs chi_args;
  auto* chi = app.add_subcommand("chi-star", "optimal adaptive value");
  chi->add_option("source", chi_args.source, "scenario path or generator")
      ->required();
  chi->add_flag("--rational", chi_args.rational, "exact arithmetic output");
  chi->add_option("--export-table", chi_args.export_table,
                  "write the state table as JSON");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "evaluate an adaptive policy");
  run_cmd->add_option("source", run_args.source, "scenario path or generator")
      ->required();
  run_cmd->add_option("--policy", run_args.policy, "policy name")->required();
  std::uint64_t run_samples = 0;
  auto* run_samples_option =
      run_cmd->add_option("--samples", run_samples, "Monte-Carlo sample count");
  run_cmd->add_flag("--exact", run_args.exact, "exact expectation");
  run_cmd->add_option("--seed", run_args.seed, "master seed (default 0)");
  run_cmd->add_flag("--trace", run_args.trace, "dump per-run traces");
  run_cmd->add_flag("--serial", run_args.serial, "disable the parallel kernel");
  run_cmd->add_option("--policy-epsilon", run_args.policy_epsilon,
                      "estimator epsilon for split-matching-fpras");
  run_cmd->add_option("--policy-delta", run_args.policy_delta,
                      "estimator delta for split-matching-fpras");
  run_cmd->add_option("--policy-k", run_args.policy_k,
                      "estimator samples for split-matching-fpras");
  run_cmd->add_option("--policy-runs", run_args.policy_runs,
                      "estimator runs for split-matching-fpras");

  RatioArgs ratio_args;
  auto* ratio = app.add_subcommand("ratio", "chi*/opt across a family");
  ratio->add_option("--family", ratio_args.family, "family name (sn)");
  ratio->add_option("--from", ratio_args.from, "first n")->required();
  ratio->add_option("--to", ratio_args.to, "last n")->required();
  ratio->add_option("--out", ratio_args.out_path, "CSV output path");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "dump sampled instantiations");
  sample->add_option("source", sample_args.source, "scenario path or generator")
      ->required();
  sample->add_option("--count", sample_args.count, "number of samples")
      ->required();
  sample->add_option("--seed", sample_args.seed, "master seed (default 0)");
  sample->add_option("--out", sample_args.out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const std::uint64_t cap = enumeration_cap_from_env();
    if (validate->parsed()) {
      StochasticModel model;
      try {
        model = load_scenario_file(validate_source);
      } catch (const ModelError& e) {
        // Semantic violations are the command's report, not a crash.
        out << e.what() << "\n";
        return kExitDomainViolation;
      }
      out << validate_model(model).to_string() << "\n";
      return kExitOk;
    }
    if (opt->parsed()) {
      if (*opt_k_option) opt_args.k = opt_k;
      if (*opt_runs_option) opt_args.runs = opt_runs;
      return cmd_opt(opt_args, cap, out);
    }
    if (chi->parsed()) return cmd_chi_star(chi_args, out);
    if (run_cmd->parsed()) {
      if (*run_samples_option) run_args.samples = run_samples;
      return cmd_run(run_args, cap, out);
    }
    if (ratio->parsed()) return cmd_ratio(ratio_args, out);
    if (sample->parsed()) return cmd_sample(sample_args, out);
    err << "no subcommand\n";
    return kExitUsage;
  } catch (const ScenarioParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << e.what() << "\n";
    return kExitResourceCap;
  } catch (const ModelError& e) {
    err << e.what() << "\n";
    return kExitDomainViolation;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitDomainViolation;
  }
}

}  // namespace stochmatch::cli
