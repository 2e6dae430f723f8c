#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codedelay/delay.hpp"
#include "codedelay/params.hpp"

namespace codedelay {

struct SweepRecord {
  int k = 0;
  double redundancy = 1.0;
  double epsilon = 0.0;
  std::int64_t bdp = 1;
  double mean = 0.0;  // s
  double std = 0.0;   // s
  double eta = 0.0;
  std::int64_t b = 1;
  double truncated_mass = 0.0;
  std::optional<double> smoothed_mean;  // s
  std::string error;                    // nonempty when this point failed

  bool ok() const { return error.empty(); }
};

struct SweepOptions {
  BDefinition b_definition = BDefinition::kCodedCount;
  DelayOptions delay;
};

/// Distinct integers spaced evenly in log k from lo to hi, both included; every integer
/// when the range has at most `points` values.
std::vector<int> log_spaced_k(int lo, int hi, int points);

/// Log-spaced integers from 2 to min(bdp - 1, 1024); every integer when the range is short.
std::vector<int> default_k_range(std::int64_t bdp, int points = 40);

/// One record per k, in input order. Failures are reported per record.
std::vector<SweepRecord> sweep(const ChannelParams& channel, double redundancy,
                               const std::vector<int>& k_range, const SweepOptions& options = {});

/// Fills smoothed_mean with an upper envelope through the sawtooth peaks that b
/// discontinuities create. A peak is the last point before a b change at which the mean
/// drops. Between two peaks the envelope is the straight line joining them, after the last
/// peak it stays at that peak's value, and before the first peak the raw mean is kept. The
/// envelope never goes below the raw mean.
void smooth_local_maxima(std::vector<SweepRecord>& records);

struct KStar {
  int k = 0;
  SweepRecord record;
};

/// Smallest k attaining the minimum smoothed mean.
KStar k_star(const ChannelParams& channel, double redundancy, const std::vector<int>& k_range,
             const SweepOptions& options = {});

/// Picks k* from records already smoothed.
KStar k_star(const std::vector<SweepRecord>& smoothed);

struct TradeoffPoint {
  double margin = 0.0;
  double redundancy = 1.0;
  int k = 0;
  double eta = 0.0;
  double mean = 0.0;  // s
  double std = 0.0;   // s
  bool arq = false;   // simulated selective-repeat reference point
  std::string error;
};

struct TradeoffOptions {
  SweepOptions sweep;
  bool include_arq = true;
  std::int64_t arq_packets = 200000;
  std::uint64_t arq_seed = 1;
};

/// k* and its efficiency for each margin, followed by an ARQ reference point when requested.
std::vector<TradeoffPoint> tradeoff_curve(const ChannelParams& channel,
                                          const std::vector<double>& margins,
                                          const std::vector<int>& k_range,
                                          const TradeoffOptions& options = {});

}  // namespace codedelay
