#include "codedelay/rng.hpp"

namespace codedelay {

CounterRng CounterRng::derive(std::uint64_t seed, std::uint64_t stream_id) {
  return CounterRng(mix64(seed ^ mix64(stream_id + kGamma)));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication) {
  return CounterRng::mix64(master ^ CounterRng::mix64(replication * 2 + 1));
}

}  // namespace codedelay
