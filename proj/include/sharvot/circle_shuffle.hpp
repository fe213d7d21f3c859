#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sharvot/crypto.hpp"

namespace sharvot {

using SessionId = std::array<uint8_t, 16>;

// The evolving Set of Shuffled Outputs: an ordered list of entry
// ciphertexts, length-framed for transit.
struct Sso {
  std::vector<Bytes> entries;

  Bytes serialize() const;
  static Sso parse(const Bytes& data);
};

// Wire layout: 16B session id || 2B hop || 4B length || ciphertext.
struct ShuffleMessage {
  SessionId session_id{};
  uint16_t hop = 0;
  Bytes ciphertext;  // whole serialized SSO, encrypted to the addressee

  Bytes serialize() const;
  static ShuffleMessage parse(const Bytes& data);
};

enum class ShufflePhase { Init, Shuffling, Unveiling, Done };

// Per-participant state machine for the two ring loops.  Participants are
// indexed 1..n in sequence order; only participant 1 holds the ephemeral
// private key and can finalize.
class ShuffleSession {
 public:
  ShuffleSession(SessionId id, unsigned index, unsigned n, KeyPair keypair,
                 std::vector<GroupElement> roster, GroupElement ephemeral_pub,
                 std::optional<mpz_class> ephemeral_priv);

  // Adds my item (encrypted under my own key), shuffles, re-encrypts the
  // set to the successor.  Participant 1 starts the loop with no incoming.
  ShuffleMessage shuffle_step(const std::optional<ShuffleMessage>& incoming,
                              const Bytes& my_item, Rng& rng);

  // Replaces my recorded entry in place with the item re-encrypted under
  // the ephemeral key; order is preserved.
  ShuffleMessage unveil_step(const ShuffleMessage& incoming, Rng& rng);

  // Participant 1 only: strip the last layer and open every entry with
  // the ephemeral private key.
  std::vector<Bytes> finalize(const ShuffleMessage& incoming);

  ShufflePhase phase() const { return phase_; }
  unsigned index() const { return index_; }
  const Bytes& my_entry_ciphertext() const { return my_entry_ct_; }

  // introspection for transcripts/tests
  const std::vector<Bytes>& last_observed_entries() const { return observed_entries_; }
  const std::vector<size_t>& last_permutation() const { return last_permutation_; }

 private:
  Sso open_incoming(const ShuffleMessage& incoming);
  ShuffleMessage seal(const Sso& sso, unsigned hop, Rng& rng) const;
  unsigned successor() const { return index_ == n_ ? 1 : index_ + 1; }

  SessionId id_;
  unsigned index_;
  unsigned n_;
  KeyPair keypair_;
  std::vector<GroupElement> roster_;
  GroupElement ephemeral_pub_;
  std::optional<mpz_class> ephemeral_priv_;
  ShufflePhase phase_ = ShufflePhase::Init;
  Bytes my_entry_ct_;
  std::vector<Bytes> observed_entries_;
  std::vector<size_t> last_permutation_;
};

// Message channel around the ring.  `receive` blocks logically on the
// single in-flight message addressed to `at`.
struct Transport {
  virtual ~Transport() = default;
  virtual void send(unsigned to, const ShuffleMessage& msg) = 0;
  virtual ShuffleMessage receive(unsigned at) = 0;
};

class InMemoryTransport : public Transport {
 public:
  // hop numbers count 1..2n across both loops; a configured abort hop
  // simulates a participant dropping out mid-protocol
  explicit InMemoryTransport(std::optional<unsigned> abort_at_hop = std::nullopt)
      : abort_at_hop_(abort_at_hop) {}

  void send(unsigned to, const ShuffleMessage& msg) override;
  ShuffleMessage receive(unsigned at) override;

 private:
  std::optional<unsigned> abort_at_hop_;
  std::vector<std::pair<unsigned, ShuffleMessage>> inbox_;
};

struct ShuffleHopRecord {
  unsigned hop = 0;
  unsigned from = 0;
  unsigned to = 0;
  Bytes wire;                        // what the network sees
  std::vector<Bytes> receiver_view;  // SSO entries after the receiver's decryption
  std::vector<size_t> permutation;   // shuffle loop only
};

struct ShuffleOutcome {
  std::vector<Bytes> outputs;  // final permuted plaintext items
  std::vector<ShuffleHopRecord> hops;
};

// Drives both loops over the transport.  All per-participant randomness
// (keys, permutations, encryption) derives from `rng` via labelled
// children, so a seed fully determines the outcome.
ShuffleOutcome run_session(const std::vector<Bytes>& items, Rng& rng,
                           Transport* transport = nullptr);

}  // namespace sharvot
