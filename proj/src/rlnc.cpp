#include "codedelay/rlnc.hpp"

#include <algorithm>
#include <string>

#include "codedelay/error.hpp"
#include "codedelay/gf256.hpp"

namespace codedelay {

Encoder::Encoder(std::uint32_t generation_id, std::vector<Bytes> payloads)
    : generation_id_(generation_id), payloads_(std::move(payloads)) {
  if (payloads_.empty()) throw InvalidArgument("a generation needs at least one packet");
  payload_size_ = payloads_.front().size();
  for (const Bytes& p : payloads_) {
    if (p.size() != payload_size_) throw InvalidArgument("payloads must have equal length");
  }
}

CodedPacket Encoder::systematic(int index) const {
  if (index < 0 || index >= k()) throw InvalidArgument("systematic index outside generation");
  return CodedPacket{generation_id_, Systematic{index}, payloads_[index]};
}

CodedPacket Encoder::coded(CounterRng& rng) const {
  Bytes coefficients(payloads_.size());
  bool nonzero = false;
  while (!nonzero) {
    for (auto& c : coefficients) {
      c = rng.byte();
      nonzero = nonzero || c != 0;
    }
  }
  Bytes payload(payload_size_, 0);
  for (std::size_t i = 0; i < payloads_.size(); ++i) {
    gf256::axpy(payload, coefficients[i], payloads_[i]);
  }
  return CodedPacket{generation_id_, Coded{std::move(coefficients)}, std::move(payload)};
}

CodedPacket Encoder::packet(int m, CounterRng& rng) const {
  if (m < 0) throw InvalidArgument("packet index must be >= 0");
  return m < k() ? systematic(m) : coded(rng);
}

Decoder::Decoder(std::uint32_t generation_id, int k, std::size_t payload_size)
    : generation_id_(generation_id),
      k_(k),
      payload_size_(payload_size),
      rows_(static_cast<std::size_t>(k)),
      seen_systematic_(static_cast<std::size_t>(k), false) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
}

bool Decoder::ingest(const CodedPacket& packet) {
  if (packet.generation_id != generation_id_) {
    throw InvalidArgument("packet for generation " + std::to_string(packet.generation_id) +
                          " sent to decoder of generation " + std::to_string(generation_id_));
  }
  if (packet.payload.size() != payload_size_) throw InvalidArgument("payload length mismatch");

  if (const auto* s = std::get_if<Systematic>(&packet.kind)) {
    if (s->index < 0 || s->index >= k_) throw InvalidArgument("systematic index outside generation");
    seen_systematic_[s->index] = true;
    auto& slot = rows_[s->index];
    if (!slot) {
      slot = Row{true, {}, packet.payload};
      ++rank_;
      return true;
    }
    if (slot->unit || complete()) return false;
    Bytes coefficients(static_cast<std::size_t>(k_), 0);
    coefficients[s->index] = 1;
    return insert(std::move(coefficients), packet.payload);
  }

  const auto& coded = std::get<Coded>(packet.kind);
  if (coded.coefficients.size() != static_cast<std::size_t>(k_)) {
    throw InvalidArgument("coefficient vector length differs from k");
  }
  if (complete()) return false;
  return insert(coded.coefficients, packet.payload);
}

bool Decoder::insert(Bytes coefficients, Bytes payload) {
  for (int col = 0; col < k_; ++col) {
    const std::uint8_t c = coefficients[col];
    if (c == 0) continue;
    const auto& row = rows_[col];
    if (!row) {
      // New pivot: normalise and store. Columns before col are already zero.
      const std::uint8_t scale = gf256::inv(c);
      gf256::scale(coefficients, scale);
      gf256::scale(payload, scale);
      rows_[col] = Row{false, std::move(coefficients), std::move(payload)};
      ++rank_;
      return true;
    }
    if (row->unit) {
      coefficients[col] = 0;
    } else {
      gf256::axpy(coefficients, c, row->coefficients);
    }
    gf256::axpy(payload, c, row->payload);
  }
  return false;
}

int Decoder::deliverable_prefix() const {
  if (complete()) return k_;
  int s = 0;
  while (s < k_ && seen_systematic_[s]) ++s;
  return s;
}

std::vector<Bytes> Decoder::decode() const {
  if (!complete()) {
    throw InvalidArgument("generation has rank " + std::to_string(rank_) + " of " +
                          std::to_string(k_));
  }
  std::vector<Bytes> out(static_cast<std::size_t>(k_));
  for (int j = k_ - 1; j >= 0; --j) {
    const Row& row = *rows_[j];
    out[j] = row.payload;
    if (row.unit) continue;
    for (int c = j + 1; c < k_; ++c) gf256::axpy(out[j], row.coefficients[c], out[c]);
  }
  return out;
}

Bytes serialize(const CodedPacket& packet, int k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  Bytes out;
  out.reserve(5 + static_cast<std::size_t>(k) + packet.payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(packet.generation_id >> shift));
  }
  if (const auto* s = std::get_if<Systematic>(&packet.kind)) {
    if (s->index < 0 || s->index >= k) throw InvalidArgument("systematic index outside generation");
    out.push_back(0);
    for (int i = 0; i < k; ++i) out.push_back(i == s->index ? 1 : 0);
  } else {
    const auto& coefficients = std::get<Coded>(packet.kind).coefficients;
    if (coefficients.size() != static_cast<std::size_t>(k)) {
      throw InvalidArgument("coefficient vector length differs from k");
    }
    out.push_back(1);
    out.insert(out.end(), coefficients.begin(), coefficients.end());
  }
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
  return out;
}

CodedPacket deserialize(std::span<const std::uint8_t> bytes, int k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const std::size_t header = 5 + static_cast<std::size_t>(k);
  if (bytes.size() < header) throw InvalidArgument("packet shorter than its header");
  CodedPacket packet;
  for (int i = 0; i < 4; ++i) packet.generation_id = (packet.generation_id << 8) | bytes[i];
  const auto coefficients = bytes.subspan(5, static_cast<std::size_t>(k));
  switch (bytes[4]) {
    case 0: {
      const auto one = std::find(coefficients.begin(), coefficients.end(), std::uint8_t{1});
      const bool unit = one != coefficients.end() &&
                        std::count(coefficients.begin(), coefficients.end(), std::uint8_t{0}) == k - 1;
      if (!unit) throw InvalidArgument("systematic packet without a unit coefficient vector");
      packet.kind = Systematic{static_cast<int>(one - coefficients.begin())};
      break;
    }
    case 1:
      packet.kind = Coded{Bytes(coefficients.begin(), coefficients.end())};
      break;
    default:
      throw InvalidArgument("unknown packet kind tag " + std::to_string(bytes[4]));
  }
  packet.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return packet;
}

}  // namespace codedelay
