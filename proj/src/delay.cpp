#include "codedelay/delay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "codedelay/error.hpp"

namespace codedelay {
namespace {

// Neumaier summation; evaluation order is fixed so results are reproducible.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::int64_t blocking_generations(const CodingParams& coding) { return coding.b - 1; }

StragglerMoments straggler_for(int z, const CodingParams& coding, const TransitionKernel& kernel) {
  if (z <= 1) return {};
  const std::int64_t n = blocking_generations(coding);
  if (n < 1) {
    throw InvalidArgument("z > 1 requires at least one earlier generation in flight (b >= 2)");
  }
  return straggler_moments(kernel, static_cast<int>(n), z);
}

}  // namespace

double DelayMoments::stddev() const { return std::sqrt(std::max(0.0, variance)); }

DelayCase classify_cell(int y, int z) {
  if (y < 1 || z < 1) throw InvalidArgument("round counts start at 1");
  if (z == 1) return y == 1 ? DelayCase::kFirstRound : DelayCase::kRetransmitted;
  return z > y ? DelayCase::kBlocked : DelayCase::kBlockedAndRetransmitted;
}

CellMoments cell_moments(int y, int z, const ChannelParams& channel, const CodingParams& coding,
                         const PrefixMoments& prefix, const StragglerMoments& straggler) {
  const double ts = channel.t_s;
  const double tp = channel.t_p;
  const double k = coding.k;
  const double nk = coding.coded_count();
  const double yd = y;
  const double zd = z;
  const double ry = 2.0 * yd - 1.0;  // propagation legs until round y decodes
  const double rz = 2.0 * zd - 1.0;
  const double v1 = straggler.v1;
  const double v2 = straggler.v2;

  CellMoments out;
  switch (classify_cell(y, z)) {
    case DelayCase::kFirstRound: {
      const double s1 = prefix.s1(1), s2 = prefix.s1(2), s3 = prefix.s1(3);
      out.mean = ts / (2.0 * k) * (s2 - (2.0 * k + 1.0) * s1 + k * (k + 3.0)) + tp;
      out.second_moment =
          tp * tp + (k + 3.0) * tp * ts + (2.0 * k * k + 9.0 * k + 13.0) / 6.0 * ts * ts -
          ((k + 3.0 + 7.0 / (6.0 * k)) * ts * ts + (2.0 * k + 1.0) / k * tp * ts) * s1 +
          ((2.0 * k + 3.0) / (2.0 * k) * ts * ts + tp * ts / k) * s2 - ts * ts * s3 / (3.0 * k);
      break;
    }
    case DelayCase::kRetransmitted: {
      const double s1 = prefix.s2(1), s2 = prefix.s2(2), s3 = prefix.s2(3);
      out.mean = (s2 / (2.0 * k) - (2.0 * nk - 1.0) * s1 / (2.0 * k) + nk - 0.5 * k + 0.5) * ts -
                 (2.0 / k * (yd - 1.0) * s1 - 2.0 * yd + 1.0) * tp;
      // The (t_s + t_p)^2 / k term belongs to the s-packet prefix and so scales with E[S].
      out.second_moment =
          (nk * (nk - k + 1.0) + (2.0 * k * k * k - 3.0 * k * k + k) / (6.0 * k)) * ts * ts +
          (2.0 * nk * ry - 2.0 * yd * (k - 1.0) + k - 1.0) * tp * ts + ry * ry * tp * tp +
          ((2.0 * nk + 1.0) * ts * ts + 2.0 * ry * tp * ts) * s2 / (2.0 * k) -
          ts * ts * s3 / (3.0 * k) -
          ((nk * nk + nk + 1.0 / 6.0) * ts * ts + ry * (2.0 * nk + 1.0) * tp * ts +
           ry * ry * tp * tp) * s1 / k +
          (ts + tp) * (ts + tp) * s1 / k;
      break;
    }
    case DelayCase::kBlocked: {
      out.mean = rz * tp - (v1 * nk + 0.5 * (k - 1.0)) * ts;
      out.second_moment =
          (nk * nk * v2 + (k - 1.0) * (nk * v1 + k / 3.0 - 1.0 / 6.0)) * ts * ts -
          rz * (2.0 * nk * v1 + k - 1.0) * tp * ts + rz * rz * tp * tp;
      break;
    }
    case DelayCase::kBlockedAndRetransmitted: {
      const double s1 = prefix.s2(1), s2 = prefix.s2(2);
      out.mean = (2.0 * (zd - yd) / k * s1 + ry) * tp -
                 (nk / k * (v1 + 1.0) * s1 - nk + 0.5 * k - 0.5) * ts;
      out.second_moment =
          ry * ((2.0 * nk - k + 1.0) * ts * tp + ry * tp * tp) +
          (nk * (nk - k + 1.0) + (2.0 * k * k - 3.0 * k + 1.0) / 6.0) * ts * ts +
          (nk * (v1 + 1.0) * ts * ts + 2.0 * (yd - zd) * tp * ts) * s2 / k +
          (nk * (nk * (v2 - 1.0) - v1 - 1.0) * ts * ts -
           2.0 * (nk * (v1 * rz + ry) + yd - zd) * tp * ts -
           4.0 * (yd - zd) * (yd + zd - 1.0) * tp * tp) * s1 / k;
      break;
    }
  }
  return out;
}

double conditional_mean(int y, int z, const ChannelParams& channel, const CodingParams& coding,
                        const TransitionKernel& kernel, const PrefixMoments& prefix) {
  return cell_moments(y, z, channel, coding, prefix, straggler_for(z, coding, kernel)).mean;
}

double conditional_second_moment(int y, int z, const ChannelParams& channel,
                                 const CodingParams& coding, const TransitionKernel& kernel,
                                 const PrefixMoments& prefix) {
  return cell_moments(y, z, channel, coding, prefix, straggler_for(z, coding, kernel))
      .second_moment;
}

DelayMoments expected_delay(const ChannelParams& channel, const CodingParams& coding,
                            const DelayOptions& options) {
  KernelOptions kopt;
  kopt.tail_tolerance = options.tail_tolerance;
  kopt.max_rounds = options.max_rounds;
  kopt.rounding = options.rounding;
  const TransitionKernel kernel = build_kernel(channel, coding, kopt);
  return expected_delay(channel, coding, kernel, options);
}

DelayMoments expected_delay(const ChannelParams& channel, const CodingParams& coding,
                            const TransitionKernel& kernel, const DelayOptions& options) {
  const PrefixMoments prefix = prefix_moments(channel.epsilon, coding.k);
  const std::int64_t blockers = blocking_generations(coding);
  const int n = static_cast<int>(blockers);

  // Last round with non-negligible mass for Y.
  int y_max = 1;
  while (kernel.survival(y_max) >= options.tail_tolerance) {
    if (++y_max > options.max_rounds) throw NumericalError("round-count tail did not converge");
  }

  // Same for Z_{b-1}: P(Z > z) = 1 - (1 - survival(z))^n.
  auto z_tail = [&](int z) {
    return n < 1 ? 0.0 : -std::expm1(n * std::log1p(-kernel.survival(z)));
  };
  int z_max = 1;
  while (z_tail(z_max) >= options.tail_tolerance) {
    if (++z_max > options.max_rounds) throw NumericalError("straggler tail did not converge");
  }

  CompensatedSum mean;
  CompensatedSum second;
  CompensatedSum skipped;
  DelayMoments out;
  for (int z = 1; z <= z_max; ++z) {
    const double pz = n < 1 ? 1.0 : kernel.p_z(n, z);
    if (pz < options.weight_threshold) {
      // Every cell in this row has weight <= pz * max_y p_Y(y) < threshold.
      skipped.add(pz * kernel.absorption_cdf(y_max));
      continue;
    }
    const StragglerMoments straggler = z > 1 ? straggler_moments(kernel, n, z) : StragglerMoments{};
    for (int y = 1; y <= y_max; ++y) {
      const double weight = kernel.p_y(y) * pz;
      if (weight < options.weight_threshold) {
        skipped.add(weight);
        continue;
      }
      const CellMoments cell = cell_moments(y, z, channel, coding, prefix, straggler);
      mean.add(weight * cell.mean);
      second.add(weight * cell.second_moment);
      ++out.terms_evaluated;
    }
  }

  out.mean = mean.value();
  out.second_moment = second.value();
  out.variance = out.second_moment - out.mean * out.mean;
  // E[D^2] - E[D]^2 cancels; anything below the rounding noise of E[D^2] is zero.
  if (std::abs(out.variance) <= 1e-12 * out.second_moment) out.variance = 0.0;
  out.truncated_mass = skipped.value() + kernel.survival(y_max) + z_tail(z_max);
  return out;
}

}  // namespace codedelay
