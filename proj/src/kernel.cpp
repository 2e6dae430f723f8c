#include "codedelay/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "codedelay/binomial.hpp"
#include "codedelay/error.hpp"

namespace codedelay {

std::vector<double> binomial_pmf(int n, double p, double q) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (q <= 0.0) {
    pmf[n] = 1.0;
    return pmf;
  }
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  const double log_p = std::log(p);
  const double log_q = std::log(q);
  const double log_n_fact = std::lgamma(n + 1.0);
  for (int m = 0; m <= n; ++m) {
    const double log_c = log_n_fact - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
    pmf[m] = std::exp(log_c + m * log_p + (n - m) * log_q);
  }
  return pmf;
}

CountMixture transmit_count(double redundancy, int i, RoundingRule rule) {
  CountMixture m = coded_count_distribution(redundancy, i);
  switch (rule) {
    case RoundingRule::kMixture:
      return m;
    case RoundingRule::kCeil:
      return CountMixture{m.high, m.high, 0.0};
    case RoundingRule::kFloor:
      return CountMixture{m.low, m.low, 0.0};
  }
  return m;
}

TransitionKernel build_kernel(const ChannelParams& channel, const CodingParams& coding,
                              const KernelOptions& options) {
  return TransitionKernel(channel.epsilon, coding.redundancy, coding.k, options);
}

TransitionKernel::TransitionKernel(double epsilon, double redundancy, int k,
                                   const KernelOptions& options)
    : k_(k), epsilon_(epsilon), redundancy_(redundancy), rounding_(options.rounding) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
  if (!(redundancy >= 1.0)) throw InvalidArgument("redundancy must be >= 1");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (k > options.max_k) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the kernel size limit " +
                          std::to_string(options.max_k));
  }

  const std::size_t size = static_cast<std::size_t>(k + 1);
  packed_.assign(size * (size + 1) / 2, 0.0);
  packed_[0] = 1.0;

  const double success = 1.0 - epsilon;
  for (int i = 1; i <= k; ++i) {
    double* row_i = packed_.data() + static_cast<std::size_t>(i) * (i + 1) / 2;
    codedelay::transmit_count(redundancy, i, rounding_).visit([&](int n, double weight) {
      const std::vector<double> pmf = binomial_pmf(n, success, epsilon);
      // Receiving m < i packets moves the chain to state i - m; m >= i absorbs.
      for (int m = 0; m < i; ++m) row_i[i - m] += weight * pmf[m];
      double tail = 0.0;
      for (int m = n; m >= i; --m) tail += pmf[m];
      row_i[0] += weight * tail;
    });
  }

  std::vector<double> dist(size, 0.0);
  dist[k] = 1.0;
  dist_.push_back(dist);
  cdf_.push_back(0.0);
  survival_.push_back(1.0);
  absorbed_.push_back(0.0);

  std::vector<double> next(size);
  while (survival_.back() >= options.tail_tolerance) {
    if (horizon() >= options.max_rounds) {
      throw NumericalError("absorption tail did not fall below " +
                           std::to_string(options.tail_tolerance) + " within " +
                           std::to_string(options.max_rounds) + " rounds");
    }
    double absorbed_now = 0.0;
    step(dist_.back(), next, absorbed_now);
    double surv = 0.0;
    for (std::size_t j = 1; j < size; ++j) surv += next[j];
    absorbed_.push_back(absorbed_now);
    cdf_.push_back(cdf_.back() + absorbed_now);
    survival_.push_back(surv);
    dist_.push_back(next);
  }
}

void TransitionKernel::step(const std::vector<double>& from, std::vector<double>& to,
                            double& absorbed_now) const {
  std::fill(to.begin(), to.end(), 0.0);
  to[0] = from[0];
  absorbed_now = 0.0;
  for (int i = 1; i <= k_; ++i) {
    const double mass = from[i];
    if (mass == 0.0) continue;
    const double* row_i = packed_.data() + static_cast<std::size_t>(i) * (i + 1) / 2;
    absorbed_now += mass * row_i[0];
    for (int j = 1; j <= i; ++j) to[j] += mass * row_i[j];
  }
  to[0] += absorbed_now;
}

void TransitionKernel::extend(int r, std::vector<double>& dist, double& absorbed,
                              double& surv) const {
  dist = dist_.back();
  std::vector<double> next(dist.size());
  absorbed = absorbed_.back();
  for (int t = horizon(); t < r; ++t) {
    step(dist, next, absorbed);
    dist.swap(next);
  }
  surv = 0.0;
  for (std::size_t j = 1; j < dist.size(); ++j) surv += dist[j];
}

double TransitionKernel::operator()(int i, int j) const {
  if (i < 0 || i > k_ || j < 0 || j > k_) throw InvalidArgument("state index out of range");
  if (j > i) return 0.0;
  return packed_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
}

std::span<const double> TransitionKernel::row(int i) const {
  if (i < 0 || i > k_) throw InvalidArgument("state index out of range");
  return {packed_.data() + static_cast<std::size_t>(i) * (i + 1) / 2,
          static_cast<std::size_t>(i) + 1};
}

CountMixture TransitionKernel::transmit_count(int i) const {
  return codedelay::transmit_count(redundancy_, i, rounding_);
}

std::span<const double> TransitionKernel::state_distribution(int r) const {
  if (r < 0 || r > horizon()) throw InvalidArgument("round outside cached horizon");
  return dist_[r];
}

double TransitionKernel::survival(int r) const {
  if (r <= 0) return 1.0;
  if (r <= horizon()) return survival_[r];
  std::vector<double> dist;
  double absorbed = 0.0;
  double surv = 0.0;
  extend(r, dist, absorbed, surv);
  return surv;
}

double TransitionKernel::absorption_cdf(int r) const {
  if (r <= 0) return 0.0;
  if (r <= horizon()) return cdf_[r];
  return 1.0 - survival(r);
}

double TransitionKernel::p_y(int y) const {
  if (y <= 0) return 0.0;
  if (y <= horizon()) return absorbed_[y];
  std::vector<double> dist;
  double absorbed = 0.0;
  double surv = 0.0;
  extend(y, dist, absorbed, surv);
  return absorbed;
}

double TransitionKernel::p_z(int n, int z) const {
  if (n < 1) throw InvalidArgument("p_z needs at least one generation");
  if (z <= 0) return 0.0;
  const double upper = absorption_cdf(z);
  if (upper <= 0.0) return 0.0;
  const double lower = absorption_cdf(z - 1);
  const double upper_n = std::pow(upper, n);
  if (lower <= 0.0) return upper_n;
  // F(z)^n - F(z-1)^n = F(z)^n (1 - (1 - beta)^n) with beta = p_y(z) / F(z).
  const double beta = p_y(z) / upper;
  return upper_n * -std::expm1(n * std::log1p(-beta));
}

}  // namespace codedelay
