#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "codedelay/kernel.hpp"
#include "codedelay/params.hpp"

namespace codedelay {

enum class SimMode {
  kIdealized,  // retransmissions take no channel time; head-of-line blocking window capped
  kRelaxed,    // retransmissions occupy slots; every earlier generation can block
};

/// hol_cap values with special meaning.
inline constexpr std::int64_t kHolCapDefault = -1;  // b - 1 generations
inline constexpr std::int64_t kHolCapUnlimited = std::numeric_limits<std::int64_t>::max();

struct SimConfig {
  ChannelParams channel;
  CodingParams coding;
  SimMode mode = SimMode::kIdealized;
  std::int64_t n_packets = 0;    // measured source packets (rounded up to whole generations)
  std::uint64_t seed = 0;
  bool use_real_codec = false;   // GF(2^8) elimination instead of counting received packets
  std::size_t payload_size = 8;  // bytes per packet when use_real_codec is set
  std::int64_t hol_cap = kHolCapDefault;  // idealized mode only
  RoundingRule rounding = RoundingRule::kMixture;
  bool record_packets = false;
  bool record_generations = false;
  int max_rounds = 10000;        // per generation; exceeding it is reported as a stall
};

struct PacketRecord {
  std::int64_t packet_id = 0;
  std::int64_t generation_id = 0;
  std::int64_t first_tx_slot = 0;
  std::int64_t delivered_slot = 0;  // slot during which in-order delivery happens
  double delay = 0.0;               // s, first transmission to in-order delivery
};

struct GenerationRecord {
  std::int64_t generation_id = 0;
  int rounds = 0;
  int prefix = 0;      // systematic packets received before the first loss
  std::int64_t received = 0;
  double decode_time = 0.0;
  double delay_sum = 0.0;     // s, over the generation's k source packets
  double delay_sq_sum = 0.0;  // s^2
};

struct SimStats {
  double mean_delay = 0.0;
  double std_delay = 0.0;
  double mean_delay_se = 0.0;    // standard error of mean_delay
  std::int64_t delay_count = 0;  // measured packets
  double mean_efficiency = 0.0;  // k * generations / packets received
  double received_mean = 0.0;    // packets received per generation
  double received_var = 0.0;
  std::int64_t generations = 0;  // measured generations
  std::int64_t innovation_failures = 0;  // received coded packets that added no rank early
  std::vector<std::int64_t> round_histogram;  // [y] = generations needing y rounds
  std::vector<PacketRecord> packets;
  std::vector<GenerationRecord> generation_records;
  int replications = 1;
};

/// Systematic RLNC transport with per-generation feedback.
SimStats run_coded(const SimConfig& config);

/// Idealized selective-repeat ARQ: per-packet NACK one RTT after transmission, lost packets
/// retransmitted ahead of new ones, infinite buffers. Coding fields are ignored.
SimStats run_arq(const SimConfig& config);

enum class SimProtocol { kCoded, kArq };

/// Independent replications with seeds derive_seed(config.seed, r), pooled in index order.
/// Per-packet and per-generation records are kept only for replication 0.
SimStats replicate(const SimConfig& config, int reps, SimProtocol protocol = SimProtocol::kCoded);

}  // namespace codedelay
