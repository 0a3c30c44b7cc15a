#ifndef COOPALLOC_CHANNEL_HPP
#define COOPALLOC_CHANNEL_HPP

#include <variant>

#include "coopalloc/rng.hpp"

namespace coopalloc {

struct FixedPer {
  double per = 0.0;
};

/// 16-QAM over AWGN. Rate-1/2 convolutional coding enters as an SNR offset.
struct AwgnQam16 {
  double snr_db = 10.0;
  int packet_bits = 24576;
  double coding_gain_db = 4.0;
};

using LinkModel = std::variant<FixedPer, AwgnQam16>;

enum class PacketOutcome { Delivered, Errored };

/// Gaussian tail probability Q(x).
double gaussian_q(double x);

/// Square 16-QAM symbol error probability at per-symbol SNR `snr_linear`.
double qam16_symbol_error(double snr_linear);

/// 1 - (1 - ber)^bits, evaluated through log1p/expm1.
double per_from_ber(double ber, int bits);

double effective_per(const LinkModel& model);

/// Throws std::invalid_argument for out-of-range parameters.
void validate(const LinkModel& model);

/// Errored with probability `per`. Consumes exactly one draw.
inline PacketOutcome draw_outcome(double per, Rng& rng) {
  return rng.uniform() < per ? PacketOutcome::Errored : PacketOutcome::Delivered;
}

}  // namespace coopalloc

#endif  // COOPALLOC_CHANNEL_HPP
