#include "codedelay/moments.hpp"

#include <cmath>
#include <limits>

#include "codedelay/error.hpp"

namespace codedelay {
namespace {

void check_prefix_args(double epsilon, int k) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
  if (k < 1) throw InvalidArgument("k must be >= 1");
}

// Direct summation over the pmf; every term is nonnegative so this is accurate for tiny epsilon.
PrefixMoments summed_prefix_moments(double epsilon, int k) {
  PrefixMoments m;
  const double log_keep = std::log1p(-epsilon);
  const double all_kept = std::exp(k * log_keep);
  const double some_lost = -std::expm1(k * log_keep);
  std::array<double, 3> partial{};
  for (int s = 0; s < k; ++s) {
    const double p = epsilon * std::exp(s * log_keep);
    const double sd = s;
    partial[0] += sd * p;
    partial[1] += sd * sd * p;
    partial[2] += sd * sd * sd * p;
  }
  const double kd = k;
  const std::array<double, 3> k_pow{kd, kd * kd, kd * kd * kd};
  for (int i = 0; i < 3; ++i) {
    m.first_round[i] = partial[i] + k_pow[i] * all_kept;
    m.retransmitted[i] = partial[i] / some_lost;
  }
  return m;
}

// 1/(e^x - 1) - 1/x, bounded near zero.
double geometric_excess(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return -0.5 + x * (1.0 / 12.0 + x2 * (-1.0 / 720.0 + x2 * (1.0 / 30240.0 + x2 * (-1.0 / 1209600.0 + x2 / 47900160.0))));
  }
  if (x > 700.0) return -1.0 / x;
  return 1.0 / std::expm1(x) - 1.0 / x;
}

// e^x / (e^x - 1)^2 - 1/x^2, bounded near zero.
double geometric_var_excess(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return -1.0 / 12.0 + x2 * (1.0 / 240.0 + x2 * (-1.0 / 6048.0 + x2 * (1.0 / 172800.0 - x2 * 9.0 / 47900160.0)));
  }
  if (x > 700.0) return -1.0 / (x * x);
  const double s = std::sinh(0.5 * x);
  return 1.0 / (4.0 * s * s) - 1.0 / (x * x);
}

struct StragglerInputs {
  double upper = 0.0;  // [P^z]_{k0}
  double lower = 0.0;  // [P^{z-1}]_{k0}
  double py = 0.0;
  double pz = 0.0;
};

StragglerInputs straggler_inputs(const TransitionKernel& kernel, int n, int z) {
  if (n < 1) throw InvalidArgument("straggler distribution needs N >= 1");
  if (z < 1) throw InvalidArgument("straggler distribution needs z >= 1");
  StragglerInputs in{kernel.absorption_cdf(z), kernel.absorption_cdf(z - 1), kernel.p_y(z),
                     kernel.p_z(n, z)};
  if (!(in.pz > 0.0)) {
    throw InvalidArgument("straggler distribution undefined: p_z(N, z) = 0");
  }
  return in;
}

}  // namespace

double prefix_pmf(double epsilon, int k, bool first_round, int s) {
  check_prefix_args(epsilon, k);
  if (s < 0 || s > k) throw InvalidArgument("prefix length outside [0, k]");
  const double keep = 1.0 - epsilon;
  if (first_round) {
    if (s == k) return std::pow(keep, k);
    return epsilon * std::pow(keep, s);
  }
  if (s == k || epsilon == 0.0) return 0.0;
  return epsilon * std::pow(keep, s) / -std::expm1(k * std::log1p(-epsilon));
}

PrefixMoments prefix_moments(double epsilon, int k) {
  check_prefix_args(epsilon, k);
  const double kd = k;
  if (epsilon == 0.0) {
    PrefixMoments m;
    m.first_round = {kd, kd * kd, kd * kd * kd};
    m.retransmitted.fill(std::numeric_limits<double>::quiet_NaN());
    m.lossless = true;
    return m;
  }
  if (epsilon < 1e-3 || kd * epsilon < 4e-3) return summed_prefix_moments(epsilon, k);

  const double e = epsilon;
  const double keep = 1.0 - e;
  const double log_all_kept = kd * std::log1p(-e);
  const double all_kept = std::exp(log_all_kept);
  const double some_lost = -std::expm1(log_all_kept);
  const double inner = some_lost - kd * e * all_kept;  // 1 - (k e + 1)(1 - e)^k

  PrefixMoments m;
  const double s11 = keep / e * some_lost;
  const double s12 = 2.0 * keep / (e * e) * inner - s11;
  const double s13 = 6.0 * keep * keep * keep / (e * e * e) * inner + 3.0 * keep * s12 -
                     3.0 * kd / e * (kd + 1.0) * all_kept * keep + (4.0 - 3.0 * e) * s11;
  m.first_round = {s11, s12, s13};
  const std::array<double, 3> k_pow{kd, kd * kd, kd * kd * kd};
  for (int i = 0; i < 3; ++i) {
    m.retransmitted[i] = (m.first_round[i] - k_pow[i] * all_kept) / some_lost;
  }
  if (k == 1) m.retransmitted.fill(0.0);  // a loss in a one-packet generation leaves S = 0
  return m;
}

double prefix_mgf(double epsilon, int k, double t) {
  check_prefix_args(epsilon, k);
  const double tail = std::exp(k * t) * std::pow(1.0 - epsilon, k);
  return epsilon * (1.0 - tail) / (1.0 - std::exp(t) + epsilon * std::exp(t)) + tail;
}

double straggler_pmf(const TransitionKernel& kernel, int n, int z, int v) {
  const StragglerInputs in = straggler_inputs(kernel, n, z);
  if (v < 0 || v >= n) throw InvalidArgument("straggler position outside [0, N-1]");
  if (in.lower <= 0.0) return v == 0 ? 1.0 : 0.0;
  return std::pow(in.upper, n - v - 1) * std::pow(in.lower, v) * in.py / in.pz;
}

StragglerMoments straggler_moments(const TransitionKernel& kernel, int n, int z) {
  const StragglerInputs in = straggler_inputs(kernel, n, z);
  if (in.lower <= 0.0 || n == 1) return {};

  const double nd = n;
  const double beta = in.py / in.upper;
  if (beta >= 0.05) {
    const double lower_n = std::pow(in.lower, n);
    StragglerMoments m;
    m.v1 = in.lower / in.py - nd * lower_n / in.pz;
    m.v2 = in.lower / in.py + 2.0 * in.lower * in.lower / (in.py * in.py) -
           nd * nd * lower_n / in.pz - 2.0 * nd * lower_n * in.lower / (in.py * in.pz);
    return m;
  }
  // Same expressions rewritten in theta = log(upper / lower): the 1/theta poles of the two
  // terms cancel analytically, which the direct form can only do numerically.
  const double theta = -std::log1p(-beta);
  StragglerMoments m;
  m.v1 = geometric_excess(theta) - nd * geometric_excess(nd * theta);
  const double variance = geometric_var_excess(theta) - nd * nd * geometric_var_excess(nd * theta);
  m.v2 = variance + m.v1 * m.v1;
  return m;
}

}  // namespace codedelay
