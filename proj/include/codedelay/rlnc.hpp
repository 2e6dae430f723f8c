#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "codedelay/rng.hpp"

namespace codedelay {

using Bytes = std::vector<std::uint8_t>;

struct Systematic {
  int index = 0;  // 0-based position within the generation
};

struct Coded {
  Bytes coefficients;  // one GF(2^8) coefficient per source packet
};

struct CodedPacket {
  std::uint32_t generation_id = 0;
  std::variant<Systematic, Coded> kind;
  Bytes payload;

  bool is_systematic() const { return std::holds_alternative<Systematic>(kind); }
};

/// Systematic RLNC encoder for one generation of k equal-length payloads.
class Encoder {
 public:
  Encoder(std::uint32_t generation_id, std::vector<Bytes> payloads);

  int k() const { return static_cast<int>(payloads_.size()); }
  std::size_t payload_size() const { return payload_size_; }
  std::uint32_t generation_id() const { return generation_id_; }

  CodedPacket systematic(int index) const;
  /// Random linear combination; all-zero coefficient vectors are re-drawn.
  CodedPacket coded(CounterRng& rng) const;
  /// The m-th packet of a first round: systematic for m < k, coded afterwards.
  CodedPacket packet(int m, CounterRng& rng) const;

 private:
  std::uint32_t generation_id_;
  std::vector<Bytes> payloads_;
  std::size_t payload_size_ = 0;
};

/// Incremental Gaussian elimination over GF(2^8). Rows are kept in echelon form indexed by
/// pivot column with the pivot scaled to 1; systematic rows are stored without coefficients.
class Decoder {
 public:
  Decoder(std::uint32_t generation_id, int k, std::size_t payload_size);

  /// Returns true when the packet increased the rank.
  bool ingest(const CodedPacket& packet);

  int k() const { return k_; }
  int rank() const { return rank_; }
  bool complete() const { return rank_ == k_; }
  std::uint32_t generation_id() const { return generation_id_; }

  /// Number of leading source packets deliverable now: the run of systematic packets
  /// 0..s-1 seen so far, or k once the generation decodes.
  int deliverable_prefix() const;

  /// Back-substitution; requires complete().
  std::vector<Bytes> decode() const;

 private:
  struct Row {
    bool unit = false;  // coefficients are e_pivot
    Bytes coefficients;
    Bytes payload;
  };

  bool insert(Bytes coefficients, Bytes payload);

  std::uint32_t generation_id_;
  int k_;
  std::size_t payload_size_;
  int rank_ = 0;
  std::vector<std::optional<Row>> rows_;
  std::vector<bool> seen_systematic_;
};

/// Wire layout: generation id (u32 big-endian), kind tag (u8: 0 systematic, 1 coded),
/// k coefficient bytes (unit vector for systematic packets), payload.
Bytes serialize(const CodedPacket& packet, int k);
CodedPacket deserialize(std::span<const std::uint8_t> bytes, int k);

}  // namespace codedelay
