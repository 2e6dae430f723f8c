#pragma once

#include "codedelay/kernel.hpp"
#include "codedelay/moments.hpp"
#include "codedelay/params.hpp"

namespace codedelay {

/// Which of the four (Y, Z_{b-1}) regions a cell falls in.
enum class DelayCase {
  kFirstRound = 1,      // y = 1, z = 1
  kRetransmitted = 2,   // y > 1, z = 1
  kBlocked = 3,         // z > y, z > 1: an earlier generation finishes last
  kBlockedAndRetransmitted = 4,  // y >= z, z > 1
};

DelayCase classify_cell(int y, int z);

struct DelayOptions {
  double weight_threshold = 1e-6;  // cells with p_Y(y) p_Z(z) below this are skipped
  double tail_tolerance = 1e-12;
  int max_rounds = 10000;
  RoundingRule rounding = RoundingRule::kMixture;
};

struct DelayMoments {
  double mean = 0.0;            // s
  double second_moment = 0.0;   // s^2
  double variance = 0.0;        // s^2
  double truncated_mass = 0.0;  // probability weight not evaluated
  int terms_evaluated = 0;

  double stddev() const;
};

/// E[D | Y = y, Z_{b-1} = z]. Case 1 uses the E[C|S] >= 1 bound, so it is a lower bound.
double conditional_mean(int y, int z, const ChannelParams& channel, const CodingParams& coding,
                        const TransitionKernel& kernel, const PrefixMoments& prefix);

/// E[D^2 | Y = y, Z_{b-1} = z].
double conditional_second_moment(int y, int z, const ChannelParams& channel,
                                 const CodingParams& coding, const TransitionKernel& kernel,
                                 const PrefixMoments& prefix);

/// Both conditional moments given precomputed straggler moments for N = b - 1 and this z
/// (ignored when z = 1).
struct CellMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};
CellMoments cell_moments(int y, int z, const ChannelParams& channel, const CodingParams& coding,
                         const PrefixMoments& prefix, const StragglerMoments& straggler);

/// Lower bound on the in-order delay moments, summed over (y, z) cells.
DelayMoments expected_delay(const ChannelParams& channel, const CodingParams& coding,
                            const DelayOptions& options = {});

DelayMoments expected_delay(const ChannelParams& channel, const CodingParams& coding,
                            const TransitionKernel& kernel, const DelayOptions& options = {});

}  // namespace codedelay
