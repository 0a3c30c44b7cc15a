#include "coopalloc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coopalloc {

namespace {

std::string profile_label(const MobileProfile& p) { return "mobile " + std::to_string(p.id); }

}  // namespace

DegenerateDenominator::DegenerateDenominator()
    : std::domain_error("closed-form split: a*per1 + per2 is zero") {}

void validate_profiles(const std::array<MobileProfile, 2>& profiles, TargetBounds bounds) {
  for (const auto& p : profiles) {
    if (!(p.target_per > 0.0 && p.target_per <= 1.0)) {
      throw ProfileError(profile_label(p) + ": target_per must lie in (0, 1]");
    }
    if (p.target_per < bounds.lo || p.target_per > bounds.hi) {
      throw ProfileError(profile_label(p) + ": target_per outside configured bounds");
    }
  }
  if (profiles[0].id == profiles[1].id) throw ProfileError("mobile ids must be distinct");
  if (profiles[0].priority == profiles[1].priority) {
    throw ProfileError("mobile priorities must be distinct");
  }
  for (const auto& rt : profiles) {
    if (rt.traffic != TrafficClass::RealTime) continue;
    for (const auto& nrt : profiles) {
      if (nrt.traffic == TrafficClass::NonRealTime && !(rt.target_per > nrt.target_per)) {
        throw ProfileError(profile_label(rt) +
                           ": Real-Time target PER must exceed every non-Real-Time target");
      }
    }
  }
}

Slot priority_slot(const std::array<MobileProfile, 2>& profiles) {
  return profiles[0].priority < profiles[1].priority ? Slot::First : Slot::Second;
}

double target_ratio(const std::array<MobileProfile, 2>& profiles) {
  return profiles[1].target_per / profiles[0].target_per;
}

RealSplit closed_form_split(double per1, double per2, double a, int k) {
  const double denom = a * per1 + per2;
  if (denom == 0.0) throw DegenerateDenominator();
  return {k * per2 / denom, k * (a * per1) / denom};
}

Counts integerize(double n1_real, int k, Slot priority_winner) {
  const double x = std::clamp(n1_real, 0.0, static_cast<double>(k));
  const double rounded =
      priority_winner == Slot::First ? std::floor(x + 0.5) : std::ceil(x - 0.5);
  const int n1 = std::clamp(static_cast<int>(rounded), 0, k);
  return {n1, k - n1};
}

Counts uniform_split(int k, Slot priority_winner) {
  const int hi = (k + 1) / 2;
  const int lo = k / 2;
  return priority_winner == Slot::First ? Counts{hi, lo} : Counts{lo, hi};
}

BurstPlan make_plan(const Counts& counts, const std::array<MobileProfile, 2>& profiles) {
  BurstPlan plan;
  plan.counts = counts;
  plan.k = counts[0] + counts[1];
  plan.order.reserve(static_cast<std::size_t>(plan.k));
  const Slot first = priority_slot(profiles);
  for (Slot s : {first, other(first)}) {
    plan.order.insert(plan.order.end(), static_cast<std::size_t>(counts[index(s)]),
                      profiles[index(s)].id);
  }
  return plan;
}

AdaptiveDecision adaptive_split(double per1, double per2, double a, int k,
                                Slot priority_winner, double per_floor, double carry) {
  AdaptiveDecision d;
  const double p1 = std::max(per1, per_floor);
  const double p2 = std::max(per2, per_floor);
  try {
    d.real = closed_form_split(p1, p2, a, k);
  } catch (const DegenerateDenominator&) {
    d.fallback = true;
    d.counts = uniform_split(k, priority_winner);
    d.real = {static_cast<double>(d.counts[0]), static_cast<double>(d.counts[1])};
    return d;
  }
  d.counts = integerize(d.real.n1 + carry, k, priority_winner);
  return d;
}

OracleResult brute_force_optimum(double per1, double per2, double t1, double t2, int k) {
  OracleResult best;
  best.feasible = false;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int n1 = 0; n1 <= k; ++n1) {
    if (!(n1 * per1 < t1)) continue;
    for (int n2 = 0; n1 + n2 <= k; ++n2) {
      if (!(n2 * per2 < t2)) continue;
      const int objective = n1 + n2;
      const double margin = std::min(t1 - n1 * per1, t2 - n2 * per2);
      // n1 ascends, so >= on the margin lets the larger N1 win exact ties.
      const bool better = !best.feasible || objective > best.objective ||
                          (objective == best.objective && margin >= best_margin);
      if (better) {
        best = {n1, n2, objective, true};
        best_margin = margin;
      }
    }
  }
  return best;
}

double expected_errors(double n1, double n2, double per1, double per2) {
  return n1 * per1 + n2 * per2;
}

ConstraintReport constraint_report(const Counts& counts, double per1, double per2, double t1,
                                   double t2) {
  ConstraintReport r;
  r.margin = {t1 - counts[0] * per1, t2 - counts[1] * per2};
  r.satisfied = {counts[0] * per1 < t1, counts[1] * per2 < t2};
  return r;
}

std::string to_string(TrafficClass c) {
  return c == TrafficClass::RealTime ? "RealTime" : "NonRealTime";
}

TrafficClass traffic_class_from_string(const std::string& s) {
  if (s == "RealTime") return TrafficClass::RealTime;
  if (s == "NonRealTime") return TrafficClass::NonRealTime;
  throw ProfileError("unknown traffic class '" + s + "'");
}

}  // namespace coopalloc
