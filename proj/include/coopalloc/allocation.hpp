#ifndef COOPALLOC_ALLOCATION_HPP
#define COOPALLOC_ALLOCATION_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopalloc {

/// Slot of a mobile inside a two-mobile scenario. Slot 0 holds mobile 1.
enum class Slot : std::uint8_t { First = 0, Second = 1 };

constexpr std::size_t index(Slot s) { return static_cast<std::size_t>(s); }
constexpr Slot other(Slot s) { return s == Slot::First ? Slot::Second : Slot::First; }

enum class TrafficClass { RealTime, NonRealTime };

struct MobileProfile {
  int id = 0;
  TrafficClass traffic = TrafficClass::NonRealTime;
  double target_per = 1e-3;
  int priority = 0;  // lower value is transmitted first
};

/// Target PER bounds used when validating a pair of profiles.
struct TargetBounds {
  double lo = 0.0;  // exclusive when zero
  double hi = 1.0;
};

/// Table 2 interval: target PERs within [1e-4, 1e-3].
inline constexpr TargetBounds kNominalTargetBounds{1e-4, 1e-3};

class ProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks target ranges, distinct ids and priorities, and that every
/// Real-Time target is strictly above every non-Real-Time target.
void validate_profiles(const std::array<MobileProfile, 2>& profiles,
                       TargetBounds bounds = {});

/// The slot that is transmitted first (lowest priority value).
Slot priority_slot(const std::array<MobileProfile, 2>& profiles);

/// a = target of mobile 2 over target of mobile 1, always recomputed.
double target_ratio(const std::array<MobileProfile, 2>& profiles);

struct RealSplit {
  double n1 = 0.0;
  double n2 = 0.0;
};

class DegenerateDenominator : public std::domain_error {
 public:
  DegenerateDenominator();
};

/// Continuous burst split
///   n1 = k * per2 / (a * per1 + per2),  n2 = k * a * per1 / (a * per1 + per2).
/// Throws DegenerateDenominator when a * per1 + per2 == 0.
RealSplit closed_form_split(double per1, double per2, double a, int k);

using Counts = std::array<int, 2>;

/// Rounds n1_real to the nearest integer; an exact half goes to the
/// winner's count. The second count is k - N1.
Counts integerize(double n1_real, int k, Slot priority_winner);

/// ceil(k/2) to the winner, floor(k/2) to the other mobile.
Counts uniform_split(int k, Slot priority_winner);

struct BurstPlan {
  int k = 0;
  Counts counts{};
  std::vector<int> order;  // mobile ids in transmission order
};

/// Lays the counts out as two contiguous blocks, priority mobile first.
BurstPlan make_plan(const Counts& counts, const std::array<MobileProfile, 2>& profiles);

struct AdaptiveDecision {
  RealSplit real;
  Counts counts{};
  bool fallback = false;  // uniform split used because both PERs were zero
};

/// Floors both estimates, runs the closed form and integerizes. `carry` is
/// added to n1 before rounding; callers that track the fractional
/// remainder across bursts pass it here (zero otherwise).
AdaptiveDecision adaptive_split(double per1, double per2, double a, int k,
                                Slot priority_winner, double per_floor,
                                double carry = 0.0);

struct OracleResult {
  int n1 = 0;
  int n2 = 0;
  int objective = 0;
  bool feasible = true;
};

/// Exhaustive search over integer pairs with N1 + N2 <= k,
/// N1 * per1 < t1 and N2 * per2 < t2. Ties prefer the larger
/// min(t1 - N1 * per1, t2 - N2 * per2), then the larger N1.
OracleResult brute_force_optimum(double per1, double per2, double t1, double t2, int k);

/// Expected errored packets in one burst: N1 * per1 + N2 * per2.
double expected_errors(double n1, double n2, double per1, double per2);
inline double expected_errors(const Counts& c, double per1, double per2) {
  return expected_errors(c[0], c[1], per1, per2);
}

struct ConstraintReport {
  std::array<double, 2> margin{};
  std::array<bool, 2> satisfied{};

  bool all_satisfied() const { return satisfied[0] && satisfied[1]; }
  /// Packets of the plan whose mobile meets its constraint.
  int satisfying_packets(const Counts& c) const {
    return (satisfied[0] ? c[0] : 0) + (satisfied[1] ? c[1] : 0);
  }
};

ConstraintReport constraint_report(const Counts& counts, double per1, double per2,
                                   double t1, double t2);

std::string to_string(TrafficClass c);
TrafficClass traffic_class_from_string(const std::string& s);

}  // namespace coopalloc

#endif  // COOPALLOC_ALLOCATION_HPP
