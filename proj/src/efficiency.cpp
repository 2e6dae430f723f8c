#include "codedelay/efficiency.hpp"

#include <string>
#include <vector>

#include "codedelay/binomial.hpp"
#include "codedelay/error.hpp"

namespace codedelay {
namespace {

// E_n[sum_{x >= i} x B(n, x, 1 - eps)], the unnormalised mean count of an absorbing round.
double absorbing_received_mass(const TransitionKernel& kernel, int i) {
  double total = 0.0;
  kernel.transmit_count(i).visit([&](int n, double weight) {
    const std::vector<double> pmf = binomial_pmf(n, 1.0 - kernel.epsilon(), kernel.epsilon());
    double partial = 0.0;
    for (int x = n; x >= i; --x) partial += x * pmf[x];
    total += weight * partial;
  });
  return total;
}

}  // namespace

double received_on_transition(const TransitionKernel& kernel, int i, int j) {
  if (i < 1 || i > kernel.k() || j < 0 || j > i) {
    throw InvalidArgument("transition (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") outside the chain");
  }
  const double a = kernel(i, j);
  if (!(a > 0.0)) throw InvalidArgument("transition has zero probability");
  if (j >= 1) return i - j;
  return absorbing_received_mass(kernel, i) / a;
}

double expected_received(const TransitionKernel& kernel) {
  const int k = kernel.k();
  std::vector<double> m(static_cast<std::size_t>(k) + 1, 0.0);
  for (int i = 1; i <= k; ++i) {
    const auto row = kernel.row(i);
    const double stay = row[i];
    if (!(stay < 1.0)) throw NumericalError("state " + std::to_string(i) + " never progresses");
    // a_{i0} E[M_{i0}] is the unnormalised absorbing mass; using it directly avoids 0/0.
    double sum = absorbing_received_mass(kernel, i);
    for (int j = 1; j < i; ++j) sum += (i - j + m[j]) * row[j];
    m[i] = sum / (1.0 - stay);
  }
  return m[k];
}

EfficiencyResult efficiency(const TransitionKernel& kernel) {
  EfficiencyResult r;
  r.expected_received = expected_received(kernel);
  r.eta = kernel.k() / r.expected_received;
  return r;
}

}  // namespace codedelay
