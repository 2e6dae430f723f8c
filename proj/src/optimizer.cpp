#include "codedelay/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "codedelay/efficiency.hpp"
#include "codedelay/error.hpp"
#include "codedelay/kernel.hpp"
#include "codedelay/parallel.hpp"
#include "codedelay/simulator.hpp"

namespace codedelay {

std::vector<int> log_spaced_k(int lo, int hi, int points) {
  if (lo < 1 || hi < lo) throw InvalidArgument("k range must satisfy 1 <= k_min <= k_max");
  if (points < 1) throw InvalidArgument("k range needs at least one point");
  std::vector<int> ks;
  if (hi - lo + 1 <= points) {
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
  }
  if (points == 1) return {lo};
  const double ratio = std::log(static_cast<double>(hi) / lo);
  for (int i = 0; i < points; ++i) {
    const int k = static_cast<int>(std::lround(lo * std::exp(ratio * i / (points - 1))));
    if (ks.empty() || k > ks.back()) ks.push_back(k);
  }
  return ks;
}

std::vector<int> default_k_range(std::int64_t bdp, int points) {
  const auto hi = static_cast<int>(std::min<std::int64_t>(bdp - 1, 1024));
  if (hi < 2) return {1};
  return log_spaced_k(2, hi, points);
}

std::vector<SweepRecord> sweep(const ChannelParams& channel, double redundancy,
                               const std::vector<int>& k_range, const SweepOptions& options) {
  if (k_range.empty()) throw InvalidArgument("k range is empty");
  if (!std::is_sorted(k_range.begin(), k_range.end())) {
    throw InvalidArgument("k range must be ascending");
  }
  std::vector<SweepRecord> records(k_range.size());
  parallel_for(records.size(), [&](std::size_t i) {
    SweepRecord& r = records[i];
    r.k = k_range[i];
    r.redundancy = redundancy;
    r.epsilon = channel.epsilon;
    r.bdp = channel.bdp;
    try {
      const CodingParams coding = make_coding(channel, r.k, redundancy, options.b_definition);
      KernelOptions kopt;
      kopt.tail_tolerance = options.delay.tail_tolerance;
      kopt.max_rounds = options.delay.max_rounds;
      kopt.rounding = options.delay.rounding;
      const TransitionKernel kernel = build_kernel(channel, coding, kopt);
      const DelayMoments d = expected_delay(channel, coding, kernel, options.delay);
      r.mean = d.mean;
      r.std = d.stddev();
      r.truncated_mass = d.truncated_mass;
      r.eta = efficiency(kernel).eta;
      r.b = coding.b;
    } catch (const Error& e) {
      r.error = e.what();
    }
  });
  return records;
}

void smooth_local_maxima(std::vector<SweepRecord>& records) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].ok()) idx.push_back(i);
  }
  std::vector<std::size_t> peaks;
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const SweepRecord& here = records[idx[j]];
    const SweepRecord& next = records[idx[j + 1]];
    if (next.b != here.b && next.mean < here.mean) peaks.push_back(j);
  }
  std::size_t p = 0;  // peaks[p] is the first peak at or after position j
  for (std::size_t j = 0; j < idx.size(); ++j) {
    SweepRecord& r = records[idx[j]];
    while (p < peaks.size() && peaks[p] < j) ++p;
    double envelope = r.mean;
    if (p > 0) {
      const SweepRecord& left = records[idx[peaks[p - 1]]];
      if (p < peaks.size()) {
        const SweepRecord& right = records[idx[peaks[p]]];
        const double w = static_cast<double>(r.k - left.k) / static_cast<double>(right.k - left.k);
        envelope = left.mean + w * (right.mean - left.mean);
      } else {
        envelope = left.mean;
      }
    }
    r.smoothed_mean = std::max(r.mean, envelope);
  }
}

KStar k_star(const std::vector<SweepRecord>& smoothed) {
  const SweepRecord* best = nullptr;
  for (const SweepRecord& r : smoothed) {
    if (!r.ok()) continue;
    const double v = r.smoothed_mean.value_or(r.mean);
    // Values equal up to rounding count as ties, which go to the smaller k.
    if (!best || v < best->smoothed_mean.value_or(best->mean) * (1.0 - 1e-12)) best = &r;
  }
  if (!best) throw NumericalError("no sweep point could be evaluated");
  return KStar{best->k, *best};
}

KStar k_star(const ChannelParams& channel, double redundancy, const std::vector<int>& k_range,
             const SweepOptions& options) {
  std::vector<SweepRecord> records = sweep(channel, redundancy, k_range, options);
  smooth_local_maxima(records);
  return k_star(records);
}

std::vector<TradeoffPoint> tradeoff_curve(const ChannelParams& channel,
                                          const std::vector<double>& margins,
                                          const std::vector<int>& k_range,
                                          const TradeoffOptions& options) {
  if (margins.empty()) throw InvalidArgument("no margins given");
  std::vector<TradeoffPoint> points;
  for (double x : margins) {
    TradeoffPoint pt;
    pt.margin = x;
    try {
      pt.redundancy = redundancy_from_margin(x, channel.epsilon);
      const KStar best = k_star(channel, pt.redundancy, k_range, options.sweep);
      pt.k = best.k;
      pt.eta = best.record.eta;
      pt.mean = best.record.mean;
      pt.std = best.record.std;
    } catch (const Error& e) {
      pt.error = e.what();
    }
    points.push_back(pt);
  }
  if (options.include_arq) {
    TradeoffPoint pt;
    pt.arq = true;
    pt.eta = 1.0;
    pt.k = 1;
    SimConfig config;
    config.channel = channel;
    config.n_packets = options.arq_packets;
    config.seed = options.arq_seed;
    const SimStats s = run_arq(config);
    pt.mean = s.mean_delay;
    pt.std = s.std_delay;
    points.push_back(pt);
  }
  return points;
}

}  // namespace codedelay
