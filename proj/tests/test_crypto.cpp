#include "doctest.h"
#include "sharvot/crypto.hpp"
#include "sharvot/hash.hpp"

#include <set>

using namespace sharvot;

TEST_CASE("keygen is deterministic under a fixed seed") {
  Rng a(42), b(42);
  KeyPair ka = KeyPair::generate(a), kb = KeyPair::generate(b);
  CHECK(ka.priv == kb.priv);
  CHECK(ka.pub == kb.pub);
}

TEST_CASE("public key re-derivable from private") {
  Rng rng(1);
  KeyPair kp = KeyPair::generate(rng);
  CHECK(GroupElement::mul_generator(kp.priv) == kp.pub);
}

TEST_CASE("distinct seeds give distinct privates") {
  std::set<mpz_class> seen;
  for (uint64_t s = 0; s < 10000; ++s) {
    Rng rng(s);
    CHECK(seen.insert(KeyPair::generate(rng).priv).second);
  }
}

TEST_CASE("encrypt/decrypt round trip at several lengths") {
  Rng rng(2);
  KeyPair kp = KeyPair::generate(rng);
  for (size_t len : {0u, 1u, 64u, 4096u}) {
    Bytes msg = rng.bytes(len);
    Ciphertext ct = encrypt(kp.pub, msg, rng);
    CHECK(decrypt(kp.priv, ct) == msg);
  }
  for (int i = 0; i < 100; ++i) {
    Bytes msg = rng.bytes(rng.below(200));
    CHECK(decrypt(kp.priv, encrypt(kp.pub, msg, rng)) == msg);
  }
}

TEST_CASE("wrong-key decryption fails authentication") {
  Rng rng(3);
  KeyPair kp = KeyPair::generate(rng), other = KeyPair::generate(rng);
  Ciphertext ct = encrypt(kp.pub, rng.bytes(32), rng);
  CHECK_THROWS_AS(decrypt(other.priv, ct), Error);
  // bit flip in payload also fails
  Ciphertext mutated = ct;
  mutated.payload[0] ^= 1;
  CHECK_THROWS_AS(decrypt(kp.priv, mutated), Error);
}

TEST_CASE("fresh randomness gives unequal ciphertexts") {
  Rng rng(4);
  KeyPair kp = KeyPair::generate(rng);
  Bytes msg = rng.bytes(32);
  CHECK(encrypt(kp.pub, msg, rng).serialize() != encrypt(kp.pub, msg, rng).serialize());
}

TEST_CASE("ciphertext serialize/parse round trip") {
  Rng rng(5);
  KeyPair kp = KeyPair::generate(rng);
  Bytes msg = rng.bytes(72);
  Ciphertext ct = encrypt(kp.pub, msg, rng);
  Bytes wire = ct.serialize();
  CHECK(wire.size() == 72 + kCiphertextOverhead);
  Ciphertext back = Ciphertext::parse(wire);
  CHECK(decrypt(kp.priv, back) == msg);
}

TEST_CASE("xor_encrypt involution and identities") {
  Rng rng(6);
  Bytes msg = rng.bytes(40);
  Bytes key = rng.bytes(64);
  CHECK(xor_encrypt(key, xor_encrypt(key, msg)) == msg);

  Bytes zeros(64, 0x00);
  CHECK(xor_encrypt(zeros, msg) == msg);

  Bytes ones(64, 0xff);
  Bytes comp = xor_encrypt(ones, msg);
  for (size_t i = 0; i < msg.size(); ++i) CHECK(comp[i] == static_cast<uint8_t>(~msg[i]));

  CHECK_THROWS_AS(xor_encrypt(Bytes(3, 0), msg), Error);  // key too short
}

TEST_CASE("sign/verify contract") {
  Rng rng(7);
  KeyPair kp = KeyPair::generate(rng), other = KeyPair::generate(rng);
  Bytes msg = rng.bytes(50);
  Signature sig = sign(kp.priv, msg);
  CHECK(sig.size() == kSignatureSize);
  CHECK(verify(kp.pub, msg, sig));

  Bytes msg2 = msg;
  msg2[10] ^= 1;
  CHECK_FALSE(verify(kp.pub, msg2, sig));
  CHECK_FALSE(verify(other.pub, msg, sig));

  Signature bad = sig;
  bad[40] ^= 1;
  CHECK_FALSE(verify(kp.pub, msg, bad));
  CHECK_FALSE(verify(kp.pub, msg, Bytes(10, 0)));
}

TEST_CASE("hash160 contract") {
  CHECK(hash160({}).size() == 20);
  CHECK(hash160({1, 2, 3}) == hash160({1, 2, 3}));
  // corpus collision scan
  Rng rng(8);
  std::set<Bytes> seen;
  for (int i = 0; i < 500; ++i) CHECK(seen.insert(hash160(rng.bytes(40))).second);
}

TEST_CASE("group element serialization is compressed and round trips") {
  Rng rng(9);
  KeyPair kp = KeyPair::generate(rng);
  Bytes enc = kp.pub.serialize();
  CHECK(enc.size() == 33);
  CHECK((enc[0] == 0x02 || enc[0] == 0x03));
  CHECK(GroupElement::parse(enc) == kp.pub);
  CHECK_FALSE(GroupElement::parseable(Bytes(33, 0x05)));
}
