#include "codedelay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <string>

#include "codedelay/error.hpp"
#include "codedelay/parallel.hpp"
#include "codedelay/rlnc.hpp"
#include "codedelay/rng.hpp"

namespace codedelay {
namespace {

constexpr std::uint64_t kErasureStream = 1;
constexpr std::uint64_t kRoundingStream = 2;
constexpr std::uint64_t kCoefficientStream = 3;
constexpr std::uint64_t kPayloadStream = 4;
constexpr int kBatches = 20;

// Welford accumulator with Chan's merge.
struct RunningMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / n;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

void validate(const SimConfig& config, bool coded) {
  const ChannelParams& ch = config.channel;
  if (!(ch.epsilon >= 0.0 && ch.epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
  if (!(ch.t_s > 0.0) || !(ch.t_p >= 0.0)) throw InvalidArgument("invalid channel timing");
  if (config.n_packets < 1) throw InvalidArgument("n_packets must be >= 1");
  if (coded) {
    if (config.coding.k < 1) throw InvalidArgument("k must be >= 1");
    if (config.n_packets < config.coding.k) throw InvalidArgument("n_packets must be >= k");
    if (!(config.coding.redundancy >= 1.0)) throw InvalidArgument("redundancy must be >= 1");
    if (config.use_real_codec && config.coding.k > 65535) {
      throw InvalidArgument("real codec supports k up to 65535");
    }
  }
}

// Slots between the end of a slot and the arrival of feedback it triggers (2 t_p).
std::int64_t feedback_slots(const ChannelParams& ch) { return snapped_ceil(2.0 * ch.t_p / ch.t_s); }

// Receiver side of one generation: counts dofs, or runs the real decoder.
class GenerationState {
 public:
  GenerationState(const SimConfig& config, std::int64_t id, CounterRng& payload_rng)
      : k_(config.coding.k) {
    if (!config.use_real_codec) return;
    std::vector<Bytes> payloads(static_cast<std::size_t>(k_), Bytes(config.payload_size));
    for (auto& p : payloads) {
      for (auto& byte : p) byte = payload_rng.byte();
    }
    const auto gid = static_cast<std::uint32_t>(id);
    decoder_ = std::make_unique<Decoder>(gid, k_, config.payload_size);
    encoder_ = std::make_unique<Encoder>(gid, std::move(payloads));
  }

  // m < k is systematic packet m; anything else is a fresh random combination.
  bool receive(int m, CounterRng& coefficient_rng) {
    if (!decoder_) {
      if (rank_ >= k_) return false;
      ++rank_;
      return true;
    }
    const bool was_complete = decoder_->complete();
    const bool innovative = decoder_->ingest(m >= 0 && m < k_ ? encoder_->systematic(m)
                                                              : encoder_->coded(coefficient_rng));
    if (!innovative && !was_complete) ++failures_;
    rank_ = decoder_->rank();
    if (innovative && decoder_->complete()) verify();
    return innovative;
  }

  int rank() const { return rank_; }
  bool complete() const { return rank_ == k_; }
  std::int64_t failures() const { return failures_; }

 private:
  void verify() const {
    const std::vector<Bytes> decoded = decoder_->decode();
    for (int i = 0; i < k_; ++i) {
      if (decoded[i] != encoder_->systematic(i).payload) {
        throw NumericalError("decoder reconstructed a payload incorrectly");
      }
    }
  }

  int k_;
  int rank_ = 0;
  std::int64_t failures_ = 0;
  std::unique_ptr<Decoder> decoder_;
  std::unique_ptr<Encoder> encoder_;
};

// Shared bookkeeping for measured generations and packets.
class Collector {
 public:
  Collector(const SimConfig& config, std::int64_t first_measured, std::int64_t measured)
      : config_(config), first_(first_measured), measured_(measured), batches_(kBatches) {}

  bool measured(std::int64_t gen) const { return gen >= first_ && gen < first_ + measured_; }

  void packet(std::int64_t gen, std::int64_t packet_id, std::int64_t first_tx_slot,
              double delivered) {
    if (!measured(gen)) return;
    const double ts = config_.channel.t_s;
    const double delay = delivered - static_cast<double>(first_tx_slot) * ts;
    delay_.add(delay);
    batches_[batch_of(gen)].add(delay);
    gen_delay_sum_ += delay;
    gen_delay_sq_sum_ += delay * delay;
    if (config_.record_packets) {
      const auto slot = static_cast<std::int64_t>(std::floor(delivered / ts));
      stats_.packets.push_back(
          PacketRecord{packet_id, gen, first_tx_slot, std::max(slot, first_tx_slot), delay});
    }
  }

  void generation(std::int64_t gen, int rounds, int prefix, std::int64_t received,
                  double decode_time, std::int64_t failures) {
    if (!measured(gen)) return;
    received_.add(static_cast<double>(received));
    received_total_ += received;
    stats_.innovation_failures += failures;
    if (stats_.round_histogram.size() <= static_cast<std::size_t>(rounds)) {
      stats_.round_histogram.resize(static_cast<std::size_t>(rounds) + 1, 0);
    }
    ++stats_.round_histogram[rounds];
    if (config_.record_generations) {
      stats_.generation_records.push_back(GenerationRecord{gen, rounds, prefix, received, decode_time,
                                                           gen_delay_sum_, gen_delay_sq_sum_});
    }
    gen_delay_sum_ = 0.0;
    gen_delay_sq_sum_ = 0.0;
  }

  SimStats finish(int k) {
    stats_.mean_delay = delay_.mean;
    stats_.std_delay = std::sqrt(delay_.variance());
    stats_.delay_count = delay_.count;
    stats_.generations = received_.count;
    stats_.received_mean = received_.mean;
    stats_.received_var = received_.variance();
    stats_.mean_efficiency =
        received_total_ > 0 ? static_cast<double>(k) * static_cast<double>(received_.count) /
                                   static_cast<double>(received_total_)
                            : 1.0;
    RunningMoments batch_means;
    for (const auto& b : batches_) {
      if (b.count > 0) batch_means.add(b.mean);
    }
    stats_.mean_delay_se =
        batch_means.count > 1 ? std::sqrt(batch_means.variance() / static_cast<double>(batch_means.count))
                              : 0.0;
    stats_.replications = 1;
    return std::move(stats_);
  }

 private:
  std::size_t batch_of(std::int64_t gen) const {
    return static_cast<std::size_t>((gen - first_) * kBatches / std::max<std::int64_t>(measured_, 1));
  }

  const SimConfig& config_;
  std::int64_t first_;
  std::int64_t measured_;
  RunningMoments delay_;
  RunningMoments received_;
  std::int64_t received_total_ = 0;
  double gen_delay_sum_ = 0.0;  // packets of the generation currently being closed
  double gen_delay_sq_sum_ = 0.0;
  std::vector<RunningMoments> batches_;
  SimStats stats_;
};

std::int64_t measured_generations(const SimConfig& config) {
  const std::int64_t k = config.coding.k;
  return (config.n_packets + k - 1) / k;
}

std::int64_t warmup_generations(const SimConfig& config) { return 5 * config.coding.b; }

std::int64_t hol_window(const SimConfig& config) {
  if (config.mode == SimMode::kRelaxed) return kHolCapUnlimited;
  if (config.hol_cap == kHolCapDefault) return config.coding.b - 1;
  if (config.hol_cap < 0) throw InvalidArgument("hol_cap must be >= 0");
  return config.hol_cap;
}

void check_rounds(int rounds, const SimConfig& config, std::int64_t gen) {
  if (rounds > config.max_rounds) {
    throw NumericalError("generation " + std::to_string(gen) + " still incomplete after " +
                         std::to_string(config.max_rounds) + " rounds");
  }
}

// Generations are independent apart from head-of-line blocking, so they are simulated one at
// a time. First rounds occupy consecutive slots; a retransmission round costs one round trip
// of propagation and no slots.
SimStats run_idealized(const SimConfig& config) {
  const ChannelParams& ch = config.channel;
  const int k = config.coding.k;
  const double ts = ch.t_s;
  const double tp = ch.t_p;
  const double redundancy = config.coding.redundancy;
  const std::int64_t warm = warmup_generations(config);
  const std::int64_t measured = measured_generations(config);
  const std::int64_t total = warm + measured;
  const std::int64_t window = hol_window(config);

  CounterRng erasures = CounterRng::derive(config.seed, kErasureStream);
  CounterRng rounding = CounterRng::derive(config.seed, kRoundingStream);
  CounterRng coefficients = CounterRng::derive(config.seed, kCoefficientStream);
  CounterRng payloads = CounterRng::derive(config.seed, kPayloadStream);
  const CountMixture first = transmit_count(redundancy, k, config.rounding);

  Collector collector(config, warm, measured);
  std::deque<double> recent_done;  // decode times of the last `window` generations
  double all_done = 0.0;           // used when the window is unlimited
  std::int64_t cursor = 0;
  std::vector<double> arrival(static_cast<std::size_t>(k));

  for (std::int64_t g = 0; g < total; ++g) {
    GenerationState state(config, g, payloads);
    const int n = first.sample(rounding.uniform());
    int prefix = -1;
    std::int64_t received = 0;
    double decode_time = 0.0;
    for (int m = 0; m < n; ++m) {
      const double t_arrive = static_cast<double>(cursor + m + 1) * ts + tp;
      const bool erased = erasures.bernoulli(ch.epsilon);
      if (m < k) {
        arrival[m] = t_arrive;
        if (erased && prefix < 0) prefix = m;
      }
      if (erased) continue;
      ++received;
      if (state.receive(m, coefficients) && state.complete()) decode_time = t_arrive;
    }
    if (prefix < 0) prefix = k;

    const double end_first = static_cast<double>(cursor + n) * ts + tp;
    int rounds = 1;
    while (!state.complete()) {
      ++rounds;
      check_rounds(rounds, config, g);
      const int nl = transmit_count(redundancy, k - state.rank(), config.rounding)
                         .sample(rounding.uniform());
      for (int m = 0; m < nl; ++m) {
        if (erasures.bernoulli(ch.epsilon)) continue;
        ++received;
        if (state.receive(-1, coefficients) && state.complete()) {
          decode_time = end_first + 2.0 * (rounds - 1) * tp;
        }
      }
    }

    double blocked = 0.0;
    if (window == kHolCapUnlimited) {
      blocked = all_done;
    } else {
      for (double d : recent_done) blocked = std::max(blocked, d);
    }
    for (int i = 0; i < k; ++i) {
      const double own = i < prefix ? arrival[i] : decode_time;
      collector.packet(g, g * k + i, cursor + i, std::max(own, blocked));
    }
    collector.generation(g, rounds, prefix, received, decode_time, state.failures());

    all_done = std::max(all_done, decode_time);
    if (window != kHolCapUnlimited && window > 0) {
      recent_done.push_back(decode_time);
      if (static_cast<std::int64_t>(recent_done.size()) > window) recent_done.pop_front();
    }
    cursor += n;
  }
  return collector.finish(k);
}

struct ActiveGeneration {
  std::unique_ptr<GenerationState> state;
  std::int64_t first_slot = 0;
  int n_first = 0;
  int sent_first = 0;
  int prefix = -1;
  int rounds = 1;
  std::int64_t received = 0;
  double decode_time = 0.0;
  std::vector<std::int64_t> systematic_slot;
  std::vector<double> arrival;
};

struct PendingFeedback {
  std::int64_t ready_slot;
  std::int64_t generation;
};

struct Retransmission {
  std::int64_t generation;
  int remaining;
};

// Slot-by-slot simulation. Retransmissions wait for a free slot (ahead of new packets) and
// every earlier generation can block delivery.
SimStats run_relaxed(const SimConfig& config) {
  const ChannelParams& ch = config.channel;
  const int k = config.coding.k;
  const double ts = ch.t_s;
  const double tp = ch.t_p;
  const double redundancy = config.coding.redundancy;
  const std::int64_t warm = warmup_generations(config);
  const std::int64_t measured = measured_generations(config);
  const std::int64_t cool = config.coding.b;
  const std::int64_t needed = warm + measured;
  const std::int64_t total = needed + cool;
  const std::int64_t fb = feedback_slots(ch);

  CounterRng erasures = CounterRng::derive(config.seed, kErasureStream);
  CounterRng rounding = CounterRng::derive(config.seed, kRoundingStream);
  CounterRng coefficients = CounterRng::derive(config.seed, kCoefficientStream);
  CounterRng payloads = CounterRng::derive(config.seed, kPayloadStream);
  const CountMixture first = transmit_count(redundancy, k, config.rounding);

  Collector collector(config, warm, measured);
  std::deque<ActiveGeneration> active;  // generations base .. base + size - 1
  std::int64_t base = 0;
  std::int64_t next_fresh = 0;  // next generation to open
  std::deque<PendingFeedback> feedback;
  std::deque<Retransmission> retx;
  double done_before = 0.0;  // all earlier generations delivered by this time
  const auto slot_limit = static_cast<std::int64_t>(
      static_cast<double>(total) * first.high * (1.0 + config.max_rounds) + 1e6);

  auto at = [&](std::int64_t g) -> ActiveGeneration& { return active[static_cast<std::size_t>(g - base)]; };

  std::int64_t t = 0;
  while (base < needed) {
    if (t > slot_limit) throw NumericalError("simulation horizon exceeded");

    while (!feedback.empty() && feedback.front().ready_slot <= t) {
      const std::int64_t g = feedback.front().generation;
      feedback.pop_front();
      ActiveGeneration& gen = at(g);
      if (gen.state->complete()) continue;
      ++gen.rounds;
      check_rounds(gen.rounds, config, g);
      const int nl = transmit_count(redundancy, k - gen.state->rank(), config.rounding)
                         .sample(rounding.uniform());
      retx.push_back({g, nl});
    }

    std::int64_t g = -1;
    int m = -1;
    bool last_of_round = false;
    if (!retx.empty()) {
      g = retx.front().generation;
      last_of_round = --retx.front().remaining == 0;
      if (last_of_round) retx.pop_front();
    } else if (const bool open = next_fresh > base && at(next_fresh - 1).sent_first < at(next_fresh - 1).n_first;
               open || next_fresh < total) {
      if (!open) {
        ActiveGeneration gen;
        gen.state = std::make_unique<GenerationState>(config, next_fresh, payloads);
        gen.first_slot = t;
        gen.n_first = first.sample(rounding.uniform());
        gen.systematic_slot.resize(static_cast<std::size_t>(k));
        gen.arrival.resize(static_cast<std::size_t>(k));
        active.push_back(std::move(gen));
        ++next_fresh;
      }
      g = next_fresh - 1;
      ActiveGeneration& gen = at(g);
      m = gen.sent_first++;
      last_of_round = gen.sent_first == gen.n_first;
    } else {
      // Nothing to send: skip to the next feedback.
      if (feedback.empty()) throw NumericalError("simulation stalled with no pending feedback");
      t = std::max(t + 1, feedback.front().ready_slot);
      continue;
    }

    ActiveGeneration& gen = at(g);
    const double t_arrive = static_cast<double>(t + 1) * ts + tp;
    const bool erased = erasures.bernoulli(ch.epsilon);
    if (m >= 0 && m < k) {
      gen.systematic_slot[m] = t;
      gen.arrival[m] = t_arrive;
      if (erased && gen.prefix < 0) gen.prefix = m;
      if (!erased && m == k - 1 && gen.prefix < 0) gen.prefix = k;
    }
    if (!erased) {
      ++gen.received;
      if (gen.state->receive(m, coefficients) && gen.state->complete()) gen.decode_time = t_arrive;
    }
    if (last_of_round && !gen.state->complete()) feedback.push_back({t + 1 + fb, g});
    ++t;

    // Deliver completed generations in order and drop those with nothing left to send.
    while (!active.empty()) {
      ActiveGeneration& front = active.front();
      const bool still_sending = front.sent_first < front.n_first;
      if (!front.state->complete() || still_sending) break;
      const bool pending_retx = std::any_of(retx.begin(), retx.end(),
                                            [&](const Retransmission& r) { return r.generation == base; });
      if (pending_retx) break;
      if (front.prefix < 0) front.prefix = k;
      for (int i = 0; i < k; ++i) {
        const double own = i < front.prefix ? front.arrival[i] : front.decode_time;
        collector.packet(base, base * k + i, front.systematic_slot[i], std::max(own, done_before));
      }
      collector.generation(base, front.rounds, front.prefix, front.received, front.decode_time,
                           front.state->failures());
      done_before = std::max(done_before, front.decode_time);
      active.pop_front();
      ++base;
    }
  }
  return collector.finish(k);
}

}  // namespace

SimStats run_coded(const SimConfig& config) {
  validate(config, true);
  return config.mode == SimMode::kIdealized ? run_idealized(config) : run_relaxed(config);
}

SimStats run_arq(const SimConfig& config) {
  validate(config, false);
  const ChannelParams& ch = config.channel;
  const double ts = ch.t_s;
  const double tp = ch.t_p;
  const std::int64_t warm = 5 * ch.bdp;
  const std::int64_t measured = config.n_packets;
  const std::int64_t needed = warm + measured;
  const std::int64_t total = needed + ch.bdp;
  const std::int64_t fb = feedback_slots(ch);

  CounterRng erasures = CounterRng::derive(config.seed, kErasureStream);
  SimConfig view = config;
  view.coding.k = 1;  // measurement batches and generation ids count single packets
  Collector collector(view, warm, measured);

  std::vector<std::int64_t> first_slot(static_cast<std::size_t>(total), -1);
  std::vector<double> arrival(static_cast<std::size_t>(total), -1.0);
  std::deque<PendingFeedback> nacks;  // generation field holds the packet id
  std::deque<std::int64_t> retx;
  std::int64_t next_fresh = 0;
  std::int64_t next_deliver = 0;
  double delivered_before = 0.0;
  const std::int64_t slot_limit = total * 1000 + 1000000;

  std::int64_t t = 0;
  while (next_deliver < needed) {
    if (t > slot_limit) throw NumericalError("simulation horizon exceeded");
    while (!nacks.empty() && nacks.front().ready_slot <= t) {
      retx.push_back(nacks.front().generation);
      nacks.pop_front();
    }
    std::int64_t p = -1;
    if (!retx.empty()) {
      p = retx.front();
      retx.pop_front();
    } else if (next_fresh < total) {
      p = next_fresh++;
      first_slot[p] = t;
    } else {
      if (nacks.empty()) throw NumericalError("simulation stalled with no pending feedback");
      t = std::max(t + 1, nacks.front().ready_slot);
      continue;
    }
    if (erasures.bernoulli(ch.epsilon)) {
      nacks.push_back({t + 1 + fb, p});
    } else {
      arrival[p] = static_cast<double>(t + 1) * ts + tp;
    }
    ++t;
    while (next_deliver < total && arrival[next_deliver] >= 0.0) {
      delivered_before = std::max(delivered_before, arrival[next_deliver]);
      collector.packet(next_deliver, next_deliver, first_slot[next_deliver], delivered_before);
      ++next_deliver;
    }
  }
  SimStats stats = collector.finish(1);
  stats.mean_efficiency = 1.0;
  stats.generations = 0;
  return stats;
}

SimStats replicate(const SimConfig& config, int reps, SimProtocol protocol) {
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  std::vector<SimStats> runs(static_cast<std::size_t>(reps));
  parallel_for(runs.size(), [&](std::size_t r) {
    SimConfig c = config;
    c.seed = reps == 1 ? config.seed : derive_seed(config.seed, r);
    if (r > 0) {
      c.record_packets = false;
      c.record_generations = false;
    }
    runs[r] = protocol == SimProtocol::kCoded ? run_coded(c) : run_arq(c);
  });
  if (reps == 1) return std::move(runs.front());

  SimStats pooled = std::move(runs.front());
  RunningMoments delay{pooled.delay_count, pooled.mean_delay,
                       pooled.std_delay * pooled.std_delay * static_cast<double>(pooled.delay_count - 1)};
  RunningMoments received{pooled.generations, pooled.received_mean,
                          pooled.received_var * static_cast<double>(std::max<std::int64_t>(pooled.generations - 1, 0))};
  RunningMoments rep_means;
  rep_means.add(pooled.mean_delay);
  double received_total = pooled.received_mean * static_cast<double>(pooled.generations);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const SimStats& s = runs[r];
    delay.merge({s.delay_count, s.mean_delay,
                 s.std_delay * s.std_delay * static_cast<double>(s.delay_count - 1)});
    received.merge({s.generations, s.received_mean,
                    s.received_var * static_cast<double>(std::max<std::int64_t>(s.generations - 1, 0))});
    rep_means.add(s.mean_delay);
    received_total += s.received_mean * static_cast<double>(s.generations);
    pooled.innovation_failures += s.innovation_failures;
    if (pooled.round_histogram.size() < s.round_histogram.size()) {
      pooled.round_histogram.resize(s.round_histogram.size(), 0);
    }
    for (std::size_t y = 0; y < s.round_histogram.size(); ++y) pooled.round_histogram[y] += s.round_histogram[y];
  }
  pooled.mean_delay = delay.mean;
  pooled.std_delay = std::sqrt(delay.variance());
  pooled.delay_count = delay.count;
  pooled.mean_delay_se = std::sqrt(rep_means.variance() / static_cast<double>(reps));
  pooled.generations = received.count;
  pooled.received_mean = received.mean;
  pooled.received_var = received.variance();
  pooled.mean_efficiency = protocol == SimProtocol::kArq || received_total <= 0.0
                               ? 1.0
                               : static_cast<double>(config.coding.k) *
                                     static_cast<double>(received.count) / received_total;
  pooled.replications = reps;
  return pooled;
}

}  // namespace codedelay
