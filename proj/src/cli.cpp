#include "coopalloc/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "coopalloc/allocation.hpp"
#include "coopalloc/config.hpp"
#include "coopalloc/experiments.hpp"

namespace coopalloc::cli {

namespace {

struct Parser {
  CLI::App app{"Cooperative relay burst allocation: calculator, simulator and sweeps", "coopsim"};
  Command cmd;
  Alloc alloc;
  Run run;
  std::string config, out, trace;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* config_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* trace_opt = nullptr;
  CLI::App* alloc_cmd = nullptr;
  CLI::App* run_cmd = nullptr;
  CLI::App* relays_cmd = nullptr;
  CLI::App* ratio_cmd = nullptr;

  Parser() {
    app.require_subcommand(1);
    seed_opt = app.add_option("--seed", seed, "Random seed, overrides the config file");
    config_opt = app.add_option("--config", config, "JSON configuration file");
    out_opt = app.add_option("--out", out, "Output file (default: standard output)");
    threads_opt = app.add_option("--threads", threads, "Worker threads for sweeps (0: all cores)");

    alloc_cmd = app.add_subcommand("alloc", "Closed-form split of one burst with oracle comparison");
    alloc_cmd->add_option("--per1", alloc.per1, "Link PER estimate of mobile 1")->required();
    alloc_cmd->add_option("--per2", alloc.per2, "Link PER estimate of mobile 2")->required();
    alloc_cmd->add_option("--t1", alloc.target1, "Target PER of mobile 1")->required();
    alloc_cmd->add_option("--t2", alloc.target2, "Target PER of mobile 2")->required();
    alloc_cmd->add_option("--k", alloc.k, "Burst length")->capture_default_str();
    alloc_cmd->add_option("--per-floor", alloc.per_floor, "Lower bound applied to both PERs")
        ->capture_default_str();

    run_cmd = app.add_subcommand("run", "Simulate one scenario and write a summary CSV row");
    trace_opt = run_cmd->add_option("--trace", trace, "Also write the per-burst trace CSV here");

    relays_cmd = app.add_subcommand("sweep-relays", "Throughput against number of relays");
    ratio_cmd = app.add_subcommand("sweep-ratio", "Adaptive vs uniform over the target ratio a");

    for (CLI::App* sub : {alloc_cmd, run_cmd, relays_cmd, ratio_cmd}) sub->fallthrough();
  }
};

}  // namespace

Command parse_args(const std::vector<std::string>& args) {
  Parser p;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    p.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(p.app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(p.app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), p.app.help());
  }

  Command& cmd = p.cmd;
  if (p.alloc_cmd->parsed()) {
    cmd.action = p.alloc;
  } else if (p.run_cmd->parsed()) {
    if (p.trace_opt->count() > 0) p.run.trace_path = p.trace;
    cmd.action = p.run;
  } else if (p.relays_cmd->parsed()) {
    cmd.action = SweepRelays{};
  } else {
    cmd.action = SweepRatio{};
  }
  if (p.seed_opt->count() > 0) cmd.seed = p.seed;
  if (p.config_opt->count() > 0) cmd.config_path = p.config;
  if (p.out_opt->count() > 0) cmd.out_path = p.out;
  if (p.threads_opt->count() > 0) cmd.threads = p.threads;
  return cmd;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void check_alloc_inputs(const Alloc& a) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(a.per1) || !in_unit(a.per2)) throw std::invalid_argument("PERs must lie in [0, 1]");
  if (!(a.target1 > 0.0 && a.target1 <= 1.0) || !(a.target2 > 0.0 && a.target2 <= 1.0)) {
    throw std::invalid_argument("target PERs must lie in (0, 1]");
  }
  if (a.k < 1) throw std::invalid_argument("k must be at least 1");
  if (!in_unit(a.per_floor)) throw std::invalid_argument("per floor must lie in [0, 1]");
}

/// Emits CSV to --out or the given stream.
void emit_csv(const Command& cmd, const std::vector<MetricsRow>& rows, std::ostream& out) {
  if (cmd.out_path) {
    write_csv(rows, *cmd.out_path);
  } else {
    write_csv(rows, out);
  }
}

nlohmann::json config_doc(const Command& cmd) {
  return cmd.config_path ? load_json(*cmd.config_path) : nlohmann::json::object();
}

std::uint64_t resolve_seed(const Command& cmd, const nlohmann::json& doc) {
  if (cmd.seed) return *cmd.seed;
  if (doc.contains("seed")) return doc.at("seed").get<std::uint64_t>();
  return kDefaultSeed;
}

}  // namespace

void cmd_alloc(const Alloc& a, std::ostream& out) {
  check_alloc_inputs(a);
  const double ratio = a.target2 / a.target1;
  // The higher target marks the Real-Time mobile, which is served first.
  const Slot winner = a.target2 > a.target1 ? Slot::Second : Slot::First;
  const AdaptiveDecision d = adaptive_split(a.per1, a.per2, ratio, a.k, winner, a.per_floor);
  const double p1 = std::max(a.per1, a.per_floor);
  const double p2 = std::max(a.per2, a.per_floor);

  out << "inputs: per1=" << fmt(a.per1) << " per2=" << fmt(a.per2) << " t1=" << fmt(a.target1)
      << " t2=" << fmt(a.target2) << " k=" << a.k << " per_floor=" << fmt(a.per_floor) << '\n';
  out << "ratio a = t2/t1 = " << fmt(ratio) << '\n';
  out << "priority mobile: " << (winner == Slot::First ? 1 : 2) << '\n';
  if (d.fallback) {
    out << "closed form: degenerate denominator (a*per1 + per2 = 0), uniform fallback\n";
  } else {
    out << "closed form: n1=" << fmt(d.real.n1) << " n2=" << fmt(d.real.n2) << '\n';
  }
  out << "integerized: N1=" << d.counts[0] << " N2=" << d.counts[1] << '\n';

  const ConstraintReport rep = constraint_report(d.counts, p1, p2, a.target1, a.target2);
  out << "margins: mobile1=" << fmt(rep.margin[0])
      << (rep.satisfied[0] ? " (satisfied)" : " (violated)") << " mobile2=" << fmt(rep.margin[1])
      << (rep.satisfied[1] ? " (satisfied)" : " (violated)") << '\n';

  const OracleResult best = brute_force_optimum(p1, p2, a.target1, a.target2, a.k);
  const int satisfying = rep.satisfying_packets(d.counts);
  out << "oracle: N1*=" << best.n1 << " N2*=" << best.n2 << " objective=" << best.objective
      << '\n';
  out << "gap: oracle objective - constraint-satisfying packets = " << best.objective - satisfying
      << '\n';
  out << "expected errors per burst: adaptive=" << fmt(expected_errors(d.counts, p1, p2))
      << " uniform=" << fmt(expected_errors(uniform_split(a.k, winner), p1, p2)) << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.text();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.usage();
    return kExitUsage;
  }

  try {
    if (const auto* a = std::get_if<Alloc>(&cmd.action)) {
      // No randomness; the seed line keeps the preamble uniform.
      out << "seed: " << cmd.seed.value_or(kDefaultSeed) << '\n';
      if (cmd.out_path) {
        std::ofstream f(*cmd.out_path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + cmd.out_path->string());
        cmd_alloc(*a, f);
      } else {
        cmd_alloc(*a, out);
      }
      return kExitOk;
    }

    const nlohmann::json doc = config_doc(cmd);
    const std::uint64_t seed = resolve_seed(cmd, doc);
    err << "seed: " << seed << '\n';

    if (const auto* r = std::get_if<Run>(&cmd.action)) {
      SimConfig c = sim_config_from_json(doc);
      c.seed = seed;
      c.record_trace = r->trace_path.has_value();
      const SimResult res = run(c);
      MetricsRow row = run_row(c, res);
      row.sweep = "run";
      emit_csv(cmd, {row}, out);
      if (r->trace_path) {
        std::ofstream f(*r->trace_path, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + r->trace_path->string());
        write_trace_csv(f, res.burst_trace);
      }
    } else if (std::holds_alternative<SweepRelays>(cmd.action)) {
      RelaySweepSpec s = relay_spec_from_json(doc);
      s.seed = seed;
      if (cmd.threads) s.threads = *cmd.threads;
      const auto rows = run_relay_sweep(s);
      emit_csv(cmd, rows, out);
      err << relay_sweep_report(rows);
    } else {
      RatioSweepSpec s = ratio_spec_from_json(doc);
      s.seed = seed;
      if (cmd.threads) s.threads = *cmd.threads;
      emit_csv(cmd, run_ratio_sweep(s), out);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace coopalloc::cli
