#pragma once

#include <gmpxx.h>

#include "sharvot/bytes.hpp"
#include "sharvot/error.hpp"
#include "sharvot/rng.hpp"

namespace sharvot {

// Element of the protocol's prime-order group (NIST P-256 behind this
// interface).  Serializes compressed: 1 parity byte + 32-byte x.
class GroupElement {
 public:
  GroupElement();  // identity
  GroupElement(const GroupElement& o);
  GroupElement& operator=(const GroupElement& o);
  GroupElement(GroupElement&& o) noexcept;
  GroupElement& operator=(GroupElement&& o) noexcept;
  ~GroupElement();

  static GroupElement generator();
  static GroupElement mul_generator(const mpz_class& scalar);
  static const mpz_class& order();  // prime; also the Shamir production field

  GroupElement mul(const mpz_class& scalar) const;
  GroupElement add(const GroupElement& o) const;
  bool operator==(const GroupElement& o) const;
  bool is_identity() const;

  Bytes serialize() const;
  static GroupElement parse(const Bytes& data);     // throws Err::ParseError
  static bool parseable(const Bytes& data);         // curve-membership probe

 private:
  explicit GroupElement(void* pt);
  void* pt_;  // EC_POINT*
};

constexpr size_t kGroupElementSize = 33;

struct KeyPair {
  mpz_class priv;      // scalar in [1, order)
  GroupElement pub;    // priv x G

  static KeyPair generate(Rng& rng);
  static KeyPair from_private(const mpz_class& priv);
};

// Hybrid ciphertext: ephemeral DH key, keystream-encrypted payload,
// truncated HMAC tag.  Wrong-key decryption fails the tag check.
struct Ciphertext {
  GroupElement ephemeral;
  Bytes payload;
  Bytes tag;  // 16 bytes

  Bytes serialize() const;  // ephemeral || payload || tag
  static Ciphertext parse(const Bytes& data);
};

constexpr size_t kCiphertextOverhead = kGroupElementSize + 16;

Ciphertext encrypt(const GroupElement& pk, const Bytes& plaintext, Rng& rng);
Bytes decrypt(const mpz_class& sk, const Ciphertext& ct);  // throws AuthenticationFailure

Bytes xor_encrypt(const Bytes& key, const Bytes& msg);  // throws Err::KeyTooShort

using Signature = Bytes;  // 33-byte commitment point || 32-byte scalar

Signature sign(const mpz_class& sk, const Bytes& msg);
bool verify(const GroupElement& pk, const Bytes& msg, const Signature& sig);

constexpr size_t kSignatureSize = kGroupElementSize + 32;

}  // namespace sharvot
