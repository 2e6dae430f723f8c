#pragma once

#include <span>
#include <vector>

#include "codedelay/params.hpp"

namespace codedelay {

/// How a fractional R*i transmit count is turned into an integer packet count.
enum class RoundingRule {
  kMixture,  // floor/ceil with probabilities given by the fractional part
  kCeil,
  kFloor,
};

struct KernelOptions {
  int max_k = 4096;
  double tail_tolerance = 1e-12;
  int max_rounds = 10000;
  RoundingRule rounding = RoundingRule::kMixture;
};

/// Degrees-of-freedom Markov chain of one generation. State i is the number of dofs the
/// receiver still needs; each round the sender transmits n_i ~ R i packets and every packet
/// survives the channel independently with probability 1 - epsilon.
///
/// The chain is lower triangular with state 0 absorbing. Construction eagerly iterates the
/// distribution of X_r (started in state k) until 1 - [P^r]_{k0} < tail_tolerance, so a built
/// kernel is immutable and may be shared between threads.
class TransitionKernel {
 public:
  TransitionKernel(double epsilon, double redundancy, int k, const KernelOptions& options = {});

  int k() const { return k_; }
  double epsilon() const { return epsilon_; }
  double redundancy() const { return redundancy_; }
  RoundingRule rounding() const { return rounding_; }

  /// P_{ij}; zero above the diagonal.
  double operator()(int i, int j) const;
  /// Entries P_{i0} .. P_{ii}.
  std::span<const double> row(int i) const;

  /// Transmit-count distribution used in state i (i >= 1).
  CountMixture transmit_count(int i) const;

  /// [P^r]_{k0}; zero for r <= 0.
  double absorption_cdf(int r) const;
  /// 1 - [P^r]_{k0}, accumulated from transient mass so that it stays accurate near zero.
  double survival(int r) const;
  /// Probability that a generation needs exactly y rounds.
  double p_y(int y) const;
  /// Probability that the slowest of n independent generations finishes in round z.
  double p_z(int n, int z) const;

  /// Number of rounds cached: survival(horizon()) < tail_tolerance.
  int horizon() const { return static_cast<int>(survival_.size()) - 1; }

  /// Distribution of X_r over states 0..k (r <= horizon()).
  std::span<const double> state_distribution(int r) const;

 private:
  void extend(int r, std::vector<double>& dist, double& absorbed, double& surv) const;
  void step(const std::vector<double>& from, std::vector<double>& to, double& absorbed_now) const;

  int k_;
  double epsilon_;
  double redundancy_;
  RoundingRule rounding_;
  std::vector<double> packed_;          // row i starts at i (i + 1) / 2
  std::vector<std::vector<double>> dist_;
  std::vector<double> cdf_;
  std::vector<double> survival_;
  std::vector<double> absorbed_;        // absorbed_[y] = p_y(y)
};

TransitionKernel build_kernel(const ChannelParams& channel, const CodingParams& coding,
                              const KernelOptions& options = {});

/// Transmit-count distribution for R*i under the given rounding rule.
CountMixture transmit_count(double redundancy, int i, RoundingRule rule);

}  // namespace codedelay
