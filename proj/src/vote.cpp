#include "sharvot/vote.hpp"

#include <cstring>

#include "sharvot/hash.hpp"

namespace sharvot {

CandidateId::CandidateId(const std::string& tag) {
  if (tag.empty() || tag.size() > kWidth)
    throw Error(Err::InvalidConfig, "candidate tag must be 1..8 bytes");
  std::memcpy(raw_.data(), tag.data(), tag.size());
}

CandidateId CandidateId::from_bytes(const Bytes& data) {
  if (data.size() != kWidth) throw Error(Err::ParseError, "candidate id must be 8 bytes");
  CandidateId id("x");
  std::memcpy(id.raw_.data(), data.data(), kWidth);
  return id;
}

std::string CandidateId::tag() const {
  size_t len = kWidth;
  while (len > 0 && raw_[len - 1] == 0) --len;
  return std::string(raw_.begin(), raw_.begin() + len);
}

size_t VoteCommitment::width(const mpz_class& modulus) {
  return 2 * FieldElement::byte_width(modulus) + CandidateId::kWidth;
}

Bytes VoteCommitment::serialize() const {
  Bytes out = share.to_bytes();
  append(out, candidate.to_bytes());
  return out;
}

VoteCommitment VoteCommitment::parse(const Bytes& data, const mpz_class& modulus) {
  if (data.size() != width(modulus))
    throw Error(Err::MalformedPlaintext, "bad vote commitment length");
  Bytes share_bytes(data.begin(), data.end() - CandidateId::kWidth);
  Bytes id_bytes(data.end() - CandidateId::kWidth, data.end());
  return {Share::from_bytes(share_bytes, modulus), CandidateId::from_bytes(id_bytes)};
}

VoteCommitment compose_vote(const Share& share, const CandidateId& candidate) {
  return {share, candidate};
}

EncryptedVote encrypt_vote(const VoteCommitment& v, const GroupElement& candidate_pk,
                           Rng& rng) {
  return {encrypt(candidate_pk, v.serialize(), rng)};
}

std::optional<VoteCommitment> try_open(const EncryptedVote& ev, const mpz_class& candidate_sk,
                                       const CandidateId& expected, const mpz_class& modulus) {
  Bytes plain;
  try {
    plain = decrypt(candidate_sk, ev.ct);
  } catch (const Error& e) {
    if (e.code() == Err::AuthenticationFailure) return std::nullopt;  // not my vote
    throw;
  }
  VoteCommitment v = VoteCommitment::parse(plain, modulus);  // malformed-plaintext on bad width
  if (!(v.candidate == expected)) return std::nullopt;
  return v;
}

namespace {
constexpr size_t kEligTagSize = 8;

Bytes elig_tag(const Bytes& v) {
  Bytes tag = sha256(v);
  tag.resize(kEligTagSize);
  return tag;
}
}  // namespace

Bytes eligibility_wrap(const Bytes& v, const EligibilityKey& key, Rng& rng) {
  switch (key.variant) {
    case EligibilityVariant::XorKey: {
      Bytes tagged = v;
      append(tagged, elig_tag(v));
      return xor_encrypt(key.symmetric_key, tagged);  // key-too-short surfaces here
    }
    case EligibilityVariant::PublicKey:
      return encrypt(key.wrap_public, v, rng).serialize();
  }
  throw Error(Err::InvalidConfig, "unknown eligibility variant");
}

std::optional<Bytes> eligibility_unwrap(const Bytes& wrapped, const EligibilityKey& key) {
  switch (key.variant) {
    case EligibilityVariant::XorKey: {
      if (wrapped.size() < kEligTagSize || key.symmetric_key.size() < wrapped.size())
        return std::nullopt;
      Bytes tagged = xor_encrypt(key.symmetric_key, wrapped);
      Bytes v(tagged.begin(), tagged.end() - kEligTagSize);
      Bytes tag(tagged.end() - kEligTagSize, tagged.end());
      if (tag != elig_tag(v)) return std::nullopt;
      return v;
    }
    case EligibilityVariant::PublicKey: {
      try {
        return decrypt(key.wrap_private, Ciphertext::parse(wrapped));
      } catch (const Error&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace sharvot
