#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "sharvot/crypto.hpp"
#include "sharvot/shamir.hpp"

namespace sharvot {

// Fixed-width ASCII candidate tag ("IdA", "IdB", ...), zero-padded to 8
// bytes so every vote plaintext has the same length.
class CandidateId {
 public:
  static constexpr size_t kWidth = 8;

  explicit CandidateId(const std::string& tag);  // throws if longer than 8 bytes
  static CandidateId from_bytes(const Bytes& data);

  Bytes to_bytes() const { return Bytes(raw_.begin(), raw_.end()); }
  std::string tag() const;  // trailing padding stripped
  bool operator==(const CandidateId&) const = default;

 private:
  std::array<uint8_t, kWidth> raw_{};
};

// Plaintext ballot: the voter's key share for the chosen candidate plus
// the candidate tag.  Layout: 32B share.x || 32B share.y || 8B id.
struct VoteCommitment {
  Share share;
  CandidateId candidate;

  Bytes serialize() const;
  static VoteCommitment parse(const Bytes& data, const mpz_class& modulus);
  static size_t width(const mpz_class& modulus);
};

struct EncryptedVote {
  Ciphertext ct;

  Bytes serialize() const { return ct.serialize(); }
  static EncryptedVote parse(const Bytes& data) { return {Ciphertext::parse(data)}; }
};

VoteCommitment compose_vote(const Share& share, const CandidateId& candidate);

EncryptedVote encrypt_vote(const VoteCommitment& v, const GroupElement& candidate_pk,
                           Rng& rng);

// Returns the commitment only when decryption authenticates AND the
// embedded id matches; nullopt is the normal "not my vote" outcome.
std::optional<VoteCommitment> try_open(const EncryptedVote& ev, const mpz_class& candidate_sk,
                                       const CandidateId& expected, const mpz_class& modulus);

enum class EligibilityVariant { XorKey = 1, PublicKey = 2 };

// Per-voter eligibility credential.  The verifier holds the full list;
// each voter only ever sees their own key material.
struct EligibilityKey {
  unsigned voter_index;
  EligibilityVariant variant;
  Bytes symmetric_key;          // variant 1 (voter + verifier)
  GroupElement wrap_public;     // variant 2 (voter side)
  mpz_class wrap_private;       // variant 2 (verifier side only)
};

// Variant 1 appends an 8-byte integrity tag before XOR-ing so the
// verifier can tell an endorsed submission from noise.
Bytes eligibility_wrap(const Bytes& v, const EligibilityKey& key, Rng& rng);

// Verifier side: nullopt when the submission does not open under this key.
std::optional<Bytes> eligibility_unwrap(const Bytes& wrapped, const EligibilityKey& key);

}  // namespace sharvot
