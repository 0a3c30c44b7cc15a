// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coopalloc/allocation.hpp"
#include "coopalloc/channel.hpp"
#include "coopalloc/cli.hpp"
#include "coopalloc/engine.hpp"
#include "coopalloc/experiments.hpp"
#include "oracles.hpp"

using namespace coopalloc;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("FAILED " + what);
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0) v.require(secs < limit_s, "runtime " + num(secs) + " s >= " + num(limit_s) + " s");
  if (!v.pass) ++failures;
  std::printf("[%s] %d. %s (%.2f s) %s\n", v.pass ? "PASS" : "FAIL", id, title, secs,
              v.detail.c_str());
  std::fflush(stdout);
}

struct Tuple {
  double per1, per2, a;
  int k;
};

Tuple random_tuple(std::mt19937_64& g) {
  std::uniform_real_distribution<double> a_dist(0.25, 4.0);
  std::uniform_int_distribution<int> k_dist(2, 50);
  return {oracle::log_uniform(g, 1e-6, 1e-2), oracle::log_uniform(g, 1e-6, 1e-2), a_dist(g),
          k_dist(g)};
}

Verdict closed_form_correctness() {
  Verdict v;
  std::mt19937_64 g(20240601);
  int sum_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const Tuple t = random_tuple(g);
    const RealSplit s = closed_form_split(t.per1, t.per2, t.a, t.k);
    if (!(std::abs(s.n1 + s.n2 - t.k) <= 1e-9 * t.k)) ++sum_bad;
  }
  v.require(sum_bad == 0, std::to_string(sum_bad) + " tuples break n1+n2=K");

  // Sorted a slices at fixed (per1, per2, K).
  int mono_bad = 0;
  std::uniform_real_distribution<double> a_dist(0.25, 4.0);
  for (int slice = 0; slice < 100; ++slice) {
    const Tuple base = random_tuple(g);
    std::vector<double> as(100);
    for (double& a : as) a = a_dist(g);
    std::sort(as.begin(), as.end());
    as.erase(std::unique(as.begin(), as.end()), as.end());
    double prev = INFINITY;
    for (double a : as) {
      const double n1 = closed_form_split(base.per1, base.per2, a, base.k).n1;
      if (!(n1 < prev)) ++mono_bad;
      prev = n1;
    }
  }
  v.require(mono_bad == 0, std::to_string(mono_bad) + " non-decreasing steps in N1(a)");
  v.note("10000 tuples, 100 sorted slices x 100 a values");
  return v;
}

Verdict symmetry_anchor() {
  Verdict v;
  for (double p : {1e-4, 5.5e-4, 1e-3}) {
    const AdaptiveDecision d = adaptive_split(p, p, 1.0, 10, Slot::First, 1e-6);
    v.require(d.counts == Counts{5, 5}, "split at per=" + num(p));
    v.require(d.counts == uniform_split(10, Slot::First), "uniform match at per=" + num(p));
  }
  return v;
}

Verdict oracle_dominance() {
  Verdict v;
  std::mt19937_64 g(777);
  double gap_sum = 0.0;
  int violated = 0, max_gap = 0;
  for (int i = 0; i < 10000; ++i) {
    const Tuple t = random_tuple(g);
    const double t1 = oracle::log_uniform(g, 1e-4, 1e-3);
    const double t2 = t.a * t1;
    const Slot winner = t2 > t1 ? Slot::Second : Slot::First;
    const AdaptiveDecision d = adaptive_split(t.per1, t.per2, t.a, t.k, winner, 1e-6);
    const int satisfying =
        constraint_report(d.counts, t.per1, t.per2, t1, t2).satisfying_packets(d.counts);
    const int best = brute_force_optimum(t.per1, t.per2, t1, t2, t.k).objective;
    if (best < satisfying) ++violated;
    gap_sum += best - satisfying;
    max_gap = std::max(max_gap, best - satisfying);
  }
  v.require(violated == 0, std::to_string(violated) + " tuples where the closed form beats the oracle");
  v.note("mean gap " + num(gap_sum / 10000.0) + " packets, max gap " + std::to_string(max_gap));
  return v;
}

Verdict expected_error_condition() {
  Verdict v;
  std::mt19937_64 g(4242);
  int mismatches = 0, adaptive_wins = 0;
  for (int i = 0; i < 10000; ++i) {
    const Tuple t = random_tuple(g);
    const RealSplit s = closed_form_split(t.per1, t.per2, t.a, t.k);
    const double adaptive = expected_errors(s.n1, s.n2, t.per1, t.per2);
    const double uniform = expected_errors(t.k / 2.0, t.k / 2.0, t.per1, t.per2);
    const bool condition = (t.per1 - t.per2) * (t.a * t.per1 - t.per2) >= 0.0;
    const bool tie = std::abs(adaptive - uniform) <= 1e-12;
    const bool dominates = adaptive <= uniform + 1e-12;
    if (!tie && dominates != condition) ++mismatches;
    adaptive_wins += dominates;
  }
  v.require(mismatches == 0, std::to_string(mismatches) + " tuples disagree with the sign condition");
  v.note("adaptive <= uniform on " + std::to_string(adaptive_wins) + "/10000 tuples");
  return v;
}

Verdict engine_fidelity() {
  Verdict v;
  SimConfig c;
  c.link_models = {FixedPer{0.001}, FixedPer{0.001}};
  c.allocator = Allocator::Uniform;
  c.burst_len_k = 10;
  c.duration_bursts = 100000;
  c.record_trace = false;
  c.seed = 1;
  const SimResult r = run(c);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& m = r.mobiles[i];
    const auto [lo, hi] = oracle::binomial_3sigma(static_cast<double>(m.sent_packets), 0.001);
    const bool ok = m.errored_packets >= lo && m.errored_packets <= hi;
    v.require(ok, "mobile " + std::to_string(i + 1) + " errors outside 3 sigma");
    v.note("mobile " + std::to_string(i + 1) + " PER " + num(m.measured_per) + " in [" +
           num(lo / m.sent_packets) + ", " + num(hi / m.sent_packets) + "]");
  }
  return v;
}

Verdict relay_sweep_shape() {
  Verdict v;
  RelaySweepSpec spec;
  spec.relay_counts = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  spec.samples_per_point = 100000;
  const auto rows = run_relay_sweep(spec);
  std::vector<double> mc, exact;
  for (const auto& r : rows) {
    mc.push_back(*r.goodput1_bps);
    exact.push_back(*r.oracle_value);
  }
  for (int n = 0; n <= 4; ++n) {
    const double rel = std::abs(mc[n] / exact[n] - 1.0);
    v.require(rel < 0.02, "n=" + std::to_string(n) + " Monte Carlo off by " + num(100 * rel) + "%");
  }
  for (int n = 1; n <= 8; ++n) {
    v.require(exact[n] >= exact[n - 1], "oracle not monotone at n=" + std::to_string(n));
    v.require(mc[n] >= mc[n - 1], "Monte Carlo not monotone at n=" + std::to_string(n));
  }
  for (const auto* col : {&exact, &mc}) {
    const auto& x = *col;
    v.require(x[1] - x[0] > x[2] - x[1] && x[2] - x[1] > x[3] - x[2],
              "marginal gains not strictly decreasing");
    v.require((x[8] - x[4]) / x[4] < 0.05, "gain from 4 to 8 relays >= 5%");
  }
  v.note("gain 0->1 " + num(100 * (mc[1] / mc[0] - 1), "%.1f") + "% (reference 22%), 1->2 " +
         num(100 * (mc[2] / mc[1] - 1), "%.1f") + "% (reference 9%), 4->8 " +
         num(100 * (mc[8] / mc[4] - 1), "%.2f") + "%");
  return v;
}

Verdict ratio_sweep_shape() {
  Verdict v;
  RatioSweepSpec spec;  // 21 log-spaced a values, equal links at 5.5e-4, K = 10
  spec.duration_bursts = 100000;
  const auto rows = run_ratio_sweep(spec);
  int goodput_bad = 0, ratio_bad = 0, dominance_bad = 0;
  double min_edge = INFINITY;
  for (std::size_t i = 0; i < spec.a_values.size(); ++i) {
    const double a = spec.a_values[i];
    const MetricsRow& ad = rows[2 * i];
    const MetricsRow& un = rows[2 * i + 1];
    if (a != 1.0) {
      // Mobile 2 holds the higher target when a > 1.
      const double hi = a > 1.0 ? *ad.goodput2_bps : *ad.goodput1_bps;
      const double lo = a > 1.0 ? *ad.goodput1_bps : *ad.goodput2_bps;
      if (!(hi > lo)) ++goodput_bad;
      min_edge = std::min(min_edge, hi / lo - 1.0);
    }
    if (std::abs((*ad.n1 / *ad.n2) * a - 1.0) > 1e-12) ++ratio_bad;
    const double p = 5.5e-4;
    if ((p - p) * (a * p - p) >= 0.0 && !(*ad.expected_errors <= *un.expected_errors + 1e-12)) {
      ++dominance_bad;
    }
  }
  v.require(goodput_bad == 0,
            std::to_string(goodput_bad) + " points where the higher-target mobile is not ahead");
  v.require(ratio_bad == 0, std::to_string(ratio_bad) + " points with N1/N2 != 1/a");
  v.require(dominance_bad == 0, std::to_string(dominance_bad) + " points with adaptive errors above uniform");
  v.note("smallest goodput edge of the higher-target mobile " + num(100 * min_edge, "%.2f") + "%");
  return v;
}

Verdict determinism() {
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "coopalloc_acceptance";
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return (dir / name).string();
  };
  const std::string run_cfg = write("run.json", R"({"duration_bursts": 20000, "seed": 9,
      "link_models": [{"type": "FixedPer", "per": 0.002}, {"type": "FixedPer", "per": 0.0007}]})");
  const std::string relay_cfg = write("relays.json", R"({"samples_per_point": 20000})");
  const std::string ratio_cfg = write("ratio.json", R"({"duration_bursts": 5000})");

  const std::vector<std::vector<std::string>> commands{
      {"run", "--config", run_cfg, "--seed", "42"},
      {"sweep-relays", "--config", relay_cfg},
      {"sweep-ratio", "--config", ratio_cfg},
  };
  for (const auto& args : commands) {
    std::string outputs[2];
    for (auto& out : outputs) {
      std::ostringstream o, e;
      v.require(cli::run_cli(args, o, e) == cli::kExitOk, args[0] + " exit code");
      out = o.str();
    }
    v.require(!outputs[0].empty() && outputs[0] == outputs[1], args[0] + " output differs");
  }
  fs::remove_all(dir);
  v.note("run, sweep-relays, sweep-ratio byte-identical");
  return v;
}

Verdict channel_sanity() {
  Verdict v;
  double prev = 2.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const double p = effective_per(AwgnQam16{-5.0 + 0.35 * i, 24576, 4.0});
    if (p > prev) ++bad;
    prev = p;
  }
  v.require(bad == 0, std::to_string(bad) + " increases of PER with SNR");
  const double p = per_from_ber(1e-5, 24576);
  v.require(std::abs(p - 0.21783) <= 1e-4, "per_from_ber(1e-5, 24576) = " + num(p, "%.8f"));
  v.require(std::abs(p - oracle::kPerFromBer1e5Bits24576) <= 1e-12,
            "mismatch with the high-precision value");
  v.note("per_from_ber(1e-5, 24576) = " + num(p, "%.8f") + ", 50-digit reference " +
         num(oracle::kPerFromBer1e5Bits24576, "%.8f"));
  return v;
}

}  // namespace

int main() {
  criterion(1, "closed-form allocator correctness", 5.0, closed_form_correctness);
  criterion(2, "symmetry anchor a=1, per1=per2, K=10 -> (5,5)", 1.0, symmetry_anchor);
  criterion(3, "oracle dominance and gap reporting", 30.0, oracle_dominance);
  criterion(4, "expected-error dominance condition", 1.0, expected_error_condition);
  criterion(5, "engine statistical fidelity", 10.0, engine_fidelity);
  criterion(6, "throughput vs relay count: shape and oracle", 60.0, relay_sweep_shape);
  criterion(7, "throughput/PER vs ratio a: qualitative shape", 300.0, ratio_sweep_shape);
  criterion(8, "determinism of every subcommand", 0.0, determinism);
  criterion(9, "channel sanity", 1.0, channel_sanity);
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
