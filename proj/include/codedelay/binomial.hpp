#pragma once

#include <vector>

namespace codedelay {

/// pmf[m] = C(n, m) p^m (1-p)^(n-m) for m = 0..n, evaluated in log space.
/// `q` is 1 - p, passed separately so that p close to 1 keeps full precision.
std::vector<double> binomial_pmf(int n, double p, double q);

}  // namespace codedelay
