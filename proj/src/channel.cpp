#include "coopalloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopalloc {

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qam16_symbol_error(double snr_linear) {
  const double q = gaussian_q(std::sqrt(std::max(snr_linear, 0.0) / 5.0));
  return std::clamp(3.0 * q * (1.0 - 0.75 * q), 0.0, 1.0);
}

double per_from_ber(double ber, int bits) {
  if (ber <= 0.0) return 0.0;
  if (ber >= 1.0) return 1.0;
  return std::clamp(-std::expm1(bits * std::log1p(-ber)), 0.0, 1.0);
}

namespace {

struct PerVisitor {
  double operator()(const FixedPer& m) const { return m.per; }
  double operator()(const AwgnQam16& m) const {
    const double snr = std::pow(10.0, (m.snr_db + m.coding_gain_db) / 10.0);
    // Gray mapping: one bit error per symbol error, 4 bits per symbol.
    return per_from_ber(qam16_symbol_error(snr) / 4.0, m.packet_bits);
  }
};

}  // namespace

double effective_per(const LinkModel& model) { return std::visit(PerVisitor{}, model); }

void validate(const LinkModel& model) {
  if (const auto* f = std::get_if<FixedPer>(&model)) {
    if (!(f->per >= 0.0 && f->per <= 1.0)) {
      throw std::invalid_argument("FixedPer.per must lie in [0, 1]");
    }
    return;
  }
  const auto& q = std::get<AwgnQam16>(model);
  if (q.packet_bits < 1) throw std::invalid_argument("AwgnQam16.packet_bits must be positive");
  if (!(q.coding_gain_db >= 0.0)) {
    throw std::invalid_argument("AwgnQam16.coding_gain_db must be non-negative");
  }
  if (std::isnan(q.snr_db)) throw std::invalid_argument("AwgnQam16.snr_db is NaN");
}

}  // namespace coopalloc
