#pragma once

#include <cstdint>

namespace codedelay {

/// Erasure channel and link timing. All times in seconds, sizes in bits.
struct ChannelParams {
  double epsilon = 0.0;           // i.i.d. packet erasure probability
  double rate_bps = 0.0;
  double packet_size_bits = 0.0;
  double t_s = 0.0;               // slot (packet transmission) time
  double t_p = 0.0;               // one-way propagation delay
  double rtt = 0.0;               // t_s + 2 t_p, acknowledgements are free
  std::int64_t bdp = 1;           // ceil(rtt / t_s) packets
};

ChannelParams derive_channel(double epsilon, double rate_bps, double packet_size_bits, double t_p);

/// Same as derive_channel but solves t_p from a round-trip time (rtt >= t_s).
ChannelParams derive_channel_from_rtt(double epsilon, double rate_bps, double packet_size_bits,
                                      double rtt);

/// Which quantity divides the BDP when counting in-flight generations.
enum class BDefinition {
  kCodedCount,      // b = ceil(BDP / (R k))
  kGenerationSize,  // b = ceil(BDP / k)
};

/// Two-point distribution of the per-round transmit count for a real-valued R*i.
/// `high` is used with probability `p_high`; degenerate when low == high.
struct CountMixture {
  int low = 0;
  int high = 0;
  double p_high = 0.0;

  bool degenerate() const { return low == high; }
  double p_low() const { return degenerate() ? 1.0 : 1.0 - p_high; }
  double mean() const { return degenerate() ? low : low + p_high * (high - low); }

  // Draws a count from a uniform variate in [0, 1).
  int sample(double u) const { return (!degenerate() && u < p_high) ? high : low; }

  template <class Fn>
  void visit(Fn&& fn) const {
    if (degenerate()) {
      fn(low, 1.0);
    } else {
      fn(low, 1.0 - p_high);
      fn(high, p_high);
    }
  }
};

CountMixture coded_count_distribution(double redundancy, int i);

struct CodingParams {
  int k = 1;
  double redundancy = 1.0;
  int n_low = 1;              // floor(R k)
  int n_high = 1;             // ceil(R k)
  double frac = 0.0;          // probability that n_high is transmitted
  std::int64_t b = 1;         // generations in flight within one BDP
  BDefinition b_definition = BDefinition::kCodedCount;
  bool exceeds_bdp = false;   // R k >= BDP: outside the model's operating region

  double coded_count() const { return redundancy * k; }
  CountMixture first_round() const { return CountMixture{n_low, n_high, frac}; }
};

CodingParams make_coding(const ChannelParams& channel, int k, double redundancy,
                         BDefinition b_definition = BDefinition::kCodedCount);

/// R_x = (1 + x) / (1 - epsilon).
double redundancy_from_margin(double margin, double epsilon);

/// ceil(x), except that values within a relative 1e-9 of an integer round to it.
std::int64_t snapped_ceil(double x);

}  // namespace codedelay
