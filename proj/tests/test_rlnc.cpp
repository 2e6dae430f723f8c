#include <cmath>
#include <vector>

#include "codedelay/error.hpp"
#include "codedelay/gf256.hpp"
#include "codedelay/rlnc.hpp"
#include "codedelay/rng.hpp"
#include "doctest.h"

using namespace codedelay;

namespace {

std::vector<Bytes> random_payloads(CounterRng& rng, int k, std::size_t size) {
  std::vector<Bytes> out(static_cast<std::size_t>(k), Bytes(size));
  for (auto& p : out) {
    for (auto& b : p) b = rng.byte();
  }
  return out;
}

}  // namespace

TEST_CASE("systematic packets decode to the originals") {
  auto rng = CounterRng::derive(1, 4);
  const auto payloads = random_payloads(rng, 6, 16);
  const Encoder enc(7, payloads);
  Decoder dec(7, 6, 16);
  for (int i = 0; i < 6; ++i) CHECK(dec.ingest(enc.systematic(i)));
  CHECK(dec.complete());
  CHECK(dec.decode() == payloads);
}

TEST_CASE("single-packet generation decodes from any coded packet") {
  auto rng = CounterRng::derive(2, 4);
  const auto payloads = random_payloads(rng, 1, 12);
  const Encoder enc(0, payloads);
  auto coef = CounterRng::derive(2, 3);
  const auto pkt = enc.coded(coef);
  const auto alpha = std::get<Coded>(pkt.kind).coefficients.at(0);
  CHECK(alpha != 0);
  for (std::size_t i = 0; i < 12; ++i) CHECK(pkt.payload[i] == gf256::mul(alpha, payloads[0][i]));
  Decoder dec(0, 1, 12);
  CHECK(dec.ingest(pkt));
  CHECK(dec.decode() == payloads);
}

TEST_CASE("identical payloads code to the coefficient sum") {
  const Bytes p{3, 14, 15, 92, 65};
  const Encoder enc(1, std::vector<Bytes>(4, p));
  auto coef = CounterRng::derive(3, 3);
  const auto pkt = enc.coded(coef);
  std::uint8_t sum = 0;
  for (auto a : std::get<Coded>(pkt.kind).coefficients) sum = gf256::add(sum, a);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(pkt.payload[i] == gf256::mul(sum, p[i]));
}

TEST_CASE("duplicate coded packet is not innovative") {
  auto rng = CounterRng::derive(4, 4);
  const Encoder enc(2, random_payloads(rng, 5, 8));
  auto coef = CounterRng::derive(4, 3);
  const auto pkt = enc.coded(coef);
  Decoder dec(2, 5, 8);
  CHECK(dec.ingest(pkt));
  CHECK_FALSE(dec.ingest(pkt));
  CHECK(dec.rank() == 1);
  CHECK(dec.ingest(enc.systematic(0)));
  CHECK_FALSE(dec.ingest(enc.systematic(0)));
}

TEST_CASE("coefficient vectors are never all zero") {
  const Encoder enc(0, std::vector<Bytes>(1, Bytes{1}));
  auto coef = CounterRng::derive(5, 3);
  for (int t = 0; t < 100000; ++t) {
    REQUIRE(std::get<Coded>(enc.coded(coef).kind).coefficients[0] != 0);
  }
}

TEST_CASE("any k innovative packets reconstruct the generation") {
  auto rng = CounterRng::derive(6, 4);
  auto coef = CounterRng::derive(6, 3);
  auto pick = CounterRng::derive(6, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(pick.next() % 32);
    const std::size_t size = 1 + pick.next() % 64;
    const auto payloads = random_payloads(rng, k, size);
    const Encoder enc(static_cast<std::uint32_t>(trial), payloads);
    Decoder dec(static_cast<std::uint32_t>(trial), k, size);
    int prev_rank = 0;
    while (!dec.complete()) {
      // Mix systematic and coded packets at random.
      const bool sys = pick.bernoulli(0.3);
      const auto pkt = sys ? enc.systematic(static_cast<int>(pick.next() % k)) : enc.coded(coef);
      const bool innovative = dec.ingest(pkt);
      REQUIRE(dec.rank() - prev_rank == (innovative ? 1 : 0));
      prev_rank = dec.rank();
    }
    REQUIRE(dec.decode() == payloads);
  }
}

TEST_CASE("innovation rate against a rank k-1 decoder") {
  auto rng = CounterRng::derive(7, 4);
  auto coef = CounterRng::derive(7, 3);
  const int k = 8, trials = 20000;
  const Encoder enc(0, random_payloads(rng, k, 4));
  int innovative = 0;
  for (int t = 0; t < trials; ++t) {
    Decoder dec(0, k, 4);
    for (int i = 0; i < k - 1; ++i) dec.ingest(enc.systematic(i));
    innovative += dec.ingest(enc.coded(coef));
  }
  const double p = 1.0 - 1.0 / 256.0;
  CHECK(std::abs(innovative / double(trials) - p) <= 3 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("deliverable prefix") {
  const Encoder enc(0, std::vector<Bytes>(5, Bytes{9, 9}));
  Decoder none(0, 5, 2);
  CHECK(none.deliverable_prefix() == 0);

  Decoder some(0, 5, 2);
  some.ingest(enc.systematic(0));
  some.ingest(enc.systematic(1));
  some.ingest(enc.systematic(3));
  CHECK(some.deliverable_prefix() == 2);

  auto rng = CounterRng::derive(8, 4);
  const Encoder enc2(0, random_payloads(rng, 4, 3));
  Decoder late(0, 4, 3);
  late.ingest(enc2.systematic(1));
  late.ingest(enc2.systematic(2));
  CHECK(late.deliverable_prefix() == 0);
  auto coef = CounterRng::derive(8, 3);
  while (!late.complete()) late.ingest(enc2.coded(coef));
  CHECK(late.deliverable_prefix() == 4);
}

TEST_CASE("decoder rejects packets it cannot use") {
  const Encoder enc(3, std::vector<Bytes>(2, Bytes{1, 2}));
  Decoder dec(4, 2, 2);
  CHECK_THROWS_AS(dec.ingest(enc.systematic(0)), InvalidArgument);
  Decoder other(3, 2, 3);
  CHECK_THROWS_AS(other.ingest(enc.systematic(0)), InvalidArgument);
  CHECK_THROWS_AS(Decoder(3, 2, 2).decode(), InvalidArgument);
  CHECK_THROWS_AS(Encoder(0, {Bytes{1}, Bytes{1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(Encoder(0, {}), InvalidArgument);
}

TEST_CASE("wire format") {
  const Encoder enc(0x01020304, {Bytes{0xAA, 0xBB}, Bytes{0xCC, 0xDD}, Bytes{0xEE, 0xFF}});
  const Bytes sys = serialize(enc.systematic(1), 3);
  CHECK(sys == Bytes{0x01, 0x02, 0x03, 0x04, 0x00, 0x00, 0x01, 0x00, 0xCC, 0xDD});

  auto coef = CounterRng::derive(9, 3);
  const auto pkt = enc.coded(coef);
  const Bytes wire = serialize(pkt, 3);
  CHECK(wire.size() == 4 + 1 + 3 + 2);
  CHECK(wire[4] == 0x01);
  const auto back = deserialize(wire, 3);
  CHECK(back.generation_id == pkt.generation_id);
  CHECK(std::get<Coded>(back.kind).coefficients == std::get<Coded>(pkt.kind).coefficients);
  CHECK(back.payload == pkt.payload);

  const auto sys_back = deserialize(sys, 3);
  CHECK(sys_back.is_systematic());
  CHECK(std::get<Systematic>(sys_back.kind).index == 1);

  Bytes bad = wire;
  bad[4] = 7;
  CHECK_THROWS_AS(deserialize(bad, 3), InvalidArgument);
  CHECK_THROWS_AS(deserialize(Bytes{1, 2, 3}, 3), InvalidArgument);
}
