#include "codedelay/params.hpp"

#include <cmath>
#include <string>

#include "codedelay/error.hpp"

namespace codedelay {
namespace {

constexpr double kSnap = 1e-9;

bool near_integer(double x, double& rounded) {
  rounded = std::round(x);
  return std::abs(x - rounded) <= kSnap * std::max(1.0, std::abs(x));
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
}

}  // namespace

std::int64_t snapped_ceil(double x) {
  double r = 0.0;
  if (near_integer(x, r)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

ChannelParams derive_channel(double epsilon, double rate_bps, double packet_size_bits, double t_p) {
  check_epsilon(epsilon);
  if (!(rate_bps > 0.0)) throw InvalidArgument("rate must be positive");
  if (!(packet_size_bits > 0.0)) throw InvalidArgument("packet size must be positive");
  if (!(t_p >= 0.0) || !std::isfinite(t_p)) throw InvalidArgument("propagation delay must be >= 0");

  ChannelParams c;
  c.epsilon = epsilon;
  c.rate_bps = rate_bps;
  c.packet_size_bits = packet_size_bits;
  c.t_s = packet_size_bits / rate_bps;
  c.t_p = t_p;
  c.rtt = c.t_s + 2.0 * t_p;
  c.bdp = std::max<std::int64_t>(1, snapped_ceil(c.rtt * rate_bps / packet_size_bits));
  return c;
}

ChannelParams derive_channel_from_rtt(double epsilon, double rate_bps, double packet_size_bits,
                                      double rtt) {
  if (!(rate_bps > 0.0) || !(packet_size_bits > 0.0)) {
    throw InvalidArgument("rate and packet size must be positive");
  }
  const double t_s = packet_size_bits / rate_bps;
  if (!(rtt >= t_s * (1.0 - kSnap))) {
    throw InvalidArgument("rtt must be at least one slot time");
  }
  return derive_channel(epsilon, rate_bps, packet_size_bits, std::max(0.0, (rtt - t_s) / 2.0));
}

CountMixture coded_count_distribution(double redundancy, int i) {
  if (!(redundancy >= 1.0)) throw InvalidArgument("redundancy must be >= 1");
  if (i < 1) throw InvalidArgument("dof count must be >= 1");
  const double x = redundancy * i;
  double r = 0.0;
  if (near_integer(x, r)) {
    const int n = static_cast<int>(r);
    return CountMixture{n, n, 0.0};
  }
  const double lo = std::floor(x);
  return CountMixture{static_cast<int>(lo), static_cast<int>(lo) + 1, x - lo};
}

CodingParams make_coding(const ChannelParams& channel, int k, double redundancy,
                         BDefinition b_definition) {
  if (k < 1) throw InvalidArgument("generation size k must be >= 1");
  const CountMixture first = coded_count_distribution(redundancy, k);

  CodingParams c;
  c.k = k;
  c.redundancy = redundancy;
  c.n_low = first.low;
  c.n_high = first.high;
  c.frac = first.p_high;
  c.b_definition = b_definition;
  const double divisor = b_definition == BDefinition::kCodedCount ? redundancy * k : k;
  c.b = std::max<std::int64_t>(1, snapped_ceil(static_cast<double>(channel.bdp) / divisor));
  c.exceeds_bdp = redundancy * k >= static_cast<double>(channel.bdp);
  return c;
}

double redundancy_from_margin(double margin, double epsilon) {
  check_epsilon(epsilon);
  if (!(margin >= 0.0)) throw InvalidArgument("margin must be >= 0");
  return (1.0 + margin) / (1.0 - epsilon);
}

}  // namespace codedelay
