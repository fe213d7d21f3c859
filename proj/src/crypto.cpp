#include "sharvot/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <cstring>
#include <mutex>

#include "sharvot/ff.hpp"
#include "sharvot/hash.hpp"

namespace sharvot {
namespace {

EC_GROUP* curve() {
  static EC_GROUP* g = [] {
    EC_GROUP* grp = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    if (!grp) throw std::runtime_error("P-256 unavailable");
    BN_CTX* ctx = BN_CTX_new();
    EC_GROUP_precompute_mult(grp, ctx);  // speeds up every k*G
    BN_CTX_free(ctx);
    return grp;
  }();
  return g;
}

struct BnCtx {
  BN_CTX* ctx;
  BnCtx() : ctx(BN_CTX_new()) {}
  ~BnCtx() { BN_CTX_free(ctx); }
};

struct Bn {
  BIGNUM* bn;
  Bn() : bn(BN_new()) {}
  explicit Bn(const mpz_class& v) : bn(BN_new()) {
    Bytes raw((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8, 0);
    size_t count = 0;
    if (v != 0) mpz_export(raw.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    BN_bin2bn(raw.data(), static_cast<int>(count), bn);
  }
  ~Bn() { BN_free(bn); }
  mpz_class to_mpz() const {
    Bytes raw(BN_num_bytes(bn));
    BN_bn2bin(bn, raw.data());
    mpz_class v;
    if (!raw.empty()) mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 1, 0, raw.data());
    return v;
  }
};

EC_POINT* pt(void* p) { return static_cast<EC_POINT*>(p); }
const EC_POINT* cpt(const void* p) { return static_cast<const EC_POINT*>(p); }

}  // namespace

GroupElement::GroupElement() : pt_(EC_POINT_new(curve())) {
  BnCtx c;
  EC_POINT_set_to_infinity(curve(), pt(pt_));
}

GroupElement::GroupElement(void* p) : pt_(p) {}

GroupElement::GroupElement(const GroupElement& o) : pt_(EC_POINT_dup(cpt(o.pt_), curve())) {}

GroupElement& GroupElement::operator=(const GroupElement& o) {
  if (this != &o) {
    EC_POINT_free(pt(pt_));
    pt_ = EC_POINT_dup(cpt(o.pt_), curve());
  }
  return *this;
}

GroupElement::GroupElement(GroupElement&& o) noexcept : pt_(o.pt_) { o.pt_ = nullptr; }

GroupElement& GroupElement::operator=(GroupElement&& o) noexcept {
  if (this != &o) {
    EC_POINT_free(pt(pt_));
    pt_ = o.pt_;
    o.pt_ = nullptr;
  }
  return *this;
}

GroupElement::~GroupElement() { EC_POINT_free(pt(pt_)); }

GroupElement GroupElement::generator() {
  return GroupElement(EC_POINT_dup(EC_GROUP_get0_generator(curve()), curve()));
}

const mpz_class& GroupElement::order() {
  static const mpz_class n = [] {
    Bn bn;
    BnCtx c;
    EC_GROUP_get_order(curve(), bn.bn, c.ctx);
    return bn.to_mpz();
  }();
  return n;
}

GroupElement GroupElement::mul_generator(const mpz_class& scalar) {
  BnCtx c;
  Bn k(scalar);
  EC_POINT* r = EC_POINT_new(curve());
  if (EC_POINT_mul(curve(), r, k.bn, nullptr, nullptr, c.ctx) != 1) {
    EC_POINT_free(r);
    throw std::runtime_error("EC_POINT_mul failed");
  }
  return GroupElement(r);
}

GroupElement GroupElement::mul(const mpz_class& scalar) const {
  BnCtx c;
  Bn k(scalar);
  EC_POINT* r = EC_POINT_new(curve());
  if (EC_POINT_mul(curve(), r, nullptr, cpt(pt_), k.bn, c.ctx) != 1) {
    EC_POINT_free(r);
    throw std::runtime_error("EC_POINT_mul failed");
  }
  return GroupElement(r);
}

GroupElement GroupElement::add(const GroupElement& o) const {
  BnCtx c;
  EC_POINT* r = EC_POINT_new(curve());
  EC_POINT_add(curve(), r, cpt(pt_), cpt(o.pt_), c.ctx);
  return GroupElement(r);
}

bool GroupElement::operator==(const GroupElement& o) const {
  BnCtx c;
  return EC_POINT_cmp(curve(), cpt(pt_), cpt(o.pt_), c.ctx) == 0;
}

bool GroupElement::is_identity() const {
  return EC_POINT_is_at_infinity(curve(), cpt(pt_)) == 1;
}

Bytes GroupElement::serialize() const {
  if (is_identity()) throw Error(Err::ParseError, "cannot serialize the identity element");
  BnCtx c;
  Bytes out(kGroupElementSize);
  size_t n = EC_POINT_point2oct(curve(), cpt(pt_), POINT_CONVERSION_COMPRESSED, out.data(),
                                out.size(), c.ctx);
  if (n != kGroupElementSize) throw std::runtime_error("point serialization failed");
  return out;
}

GroupElement GroupElement::parse(const Bytes& data) {
  if (data.size() != kGroupElementSize)
    throw Error(Err::ParseError, "group element must be 33 bytes");
  BnCtx c;
  EC_POINT* r = EC_POINT_new(curve());
  if (EC_POINT_oct2point(curve(), r, data.data(), data.size(), c.ctx) != 1) {
    EC_POINT_free(r);
    throw Error(Err::ParseError, "not a curve point");
  }
  return GroupElement(r);
}

bool GroupElement::parseable(const Bytes& data) {
  if (data.size() != kGroupElementSize || (data[0] != 0x02 && data[0] != 0x03)) return false;
  BnCtx c;
  EC_POINT* r = EC_POINT_new(curve());
  bool ok = EC_POINT_oct2point(curve(), r, data.data(), data.size(), c.ctx) == 1;
  EC_POINT_free(r);
  return ok;
}

KeyPair KeyPair::generate(Rng& rng) {
  mpz_class sk = rng.below_mpz(GroupElement::order() - 1) + 1;
  return from_private(sk);
}

KeyPair KeyPair::from_private(const mpz_class& priv) {
  if (priv <= 0 || priv >= GroupElement::order())
    throw Error(Err::InvalidConfig, "private scalar out of range");
  return {priv, GroupElement::mul_generator(priv)};
}

namespace {

constexpr size_t kTagSize = 16;

// enc/mac keys from the DH transcript
void derive_keys(const GroupElement& ephemeral, const GroupElement& shared, Bytes& enc_key,
                 Bytes& mac_key) {
  Bytes material = ephemeral.serialize();
  append(material, shared.serialize());
  Bytes km = sha256(material);
  enc_key = sha256(concat(km, Bytes{0x01}));
  mac_key = sha256(concat(km, Bytes{0x02}));
}

Bytes keystream_xor(const Bytes& key, const Bytes& data) {
  Bytes out(data.size());
  Bytes block;
  for (size_t off = 0; off < data.size(); off += 32) {
    Bytes ctr = key;
    append_u64_be(ctr, off / 32);
    block = sha256(ctr);
    size_t take = std::min<size_t>(32, data.size() - off);
    for (size_t i = 0; i < take; ++i) out[off + i] = data[off + i] ^ block[i];
  }
  return out;
}

}  // namespace

Ciphertext encrypt(const GroupElement& pk, const Bytes& plaintext, Rng& rng) {
  KeyPair eph = KeyPair::generate(rng);
  GroupElement shared = pk.mul(eph.priv);
  Bytes enc_key, mac_key;
  derive_keys(eph.pub, shared, enc_key, mac_key);
  Bytes payload = keystream_xor(enc_key, plaintext);
  Bytes tag = hmac_sha256(mac_key, payload);
  tag.resize(kTagSize);
  return {std::move(eph.pub), std::move(payload), std::move(tag)};
}

Bytes decrypt(const mpz_class& sk, const Ciphertext& ct) {
  GroupElement shared = ct.ephemeral.mul(sk);
  if (shared.is_identity()) throw Error(Err::AuthenticationFailure, "degenerate shared point");
  Bytes enc_key, mac_key;
  derive_keys(ct.ephemeral, shared, enc_key, mac_key);
  Bytes tag = hmac_sha256(mac_key, ct.payload);
  tag.resize(kTagSize);
  if (ct.tag.size() != kTagSize || CRYPTO_memcmp(tag.data(), ct.tag.data(), kTagSize) != 0)
    throw Error(Err::AuthenticationFailure, "ciphertext tag mismatch");
  return keystream_xor(enc_key, ct.payload);
}

Bytes Ciphertext::serialize() const {
  Bytes out = ephemeral.serialize();
  append(out, payload);
  append(out, tag);
  return out;
}

Ciphertext Ciphertext::parse(const Bytes& data) {
  if (data.size() < kCiphertextOverhead)
    throw Error(Err::ParseError, "ciphertext too short");
  Bytes eph(data.begin(), data.begin() + kGroupElementSize);
  Bytes payload(data.begin() + kGroupElementSize, data.end() - kTagSize);
  Bytes tag(data.end() - kTagSize, data.end());
  return {GroupElement::parse(eph), std::move(payload), std::move(tag)};
}

Bytes xor_encrypt(const Bytes& key, const Bytes& msg) {
  if (key.size() < msg.size())
    throw Error(Err::KeyTooShort, "xor key shorter than message");
  Bytes out(msg.size());
  for (size_t i = 0; i < msg.size(); ++i) out[i] = msg[i] ^ key[i];
  return out;
}

Signature sign(const mpz_class& sk, const Bytes& msg) {
  const mpz_class& n = GroupElement::order();
  // deterministic nonce bound to key and message
  Bytes sk_bytes((mpz_sizeinbase(sk.get_mpz_t(), 2) + 7) / 8);
  size_t count = 0;
  if (sk != 0) mpz_export(sk_bytes.data(), &count, 1, 1, 1, 0, sk.get_mpz_t());
  Rng nonce_rng(concat(sk_bytes, sha256(msg)));
  mpz_class k = nonce_rng.below_mpz(n - 1) + 1;

  GroupElement commit = GroupElement::mul_generator(k);
  GroupElement pk = GroupElement::mul_generator(sk);
  Bytes challenge_input = commit.serialize();
  append(challenge_input, pk.serialize());
  append(challenge_input, msg);
  mpz_class e;
  Bytes h = sha256(challenge_input);
  mpz_import(e.get_mpz_t(), h.size(), 1, 1, 1, 0, h.data());
  e %= n;
  mpz_class s = (k + e * sk) % n;

  Signature sig = commit.serialize();
  append(sig, FieldElement(s, n).to_bytes(32));
  return sig;
}

bool verify(const GroupElement& pk, const Bytes& msg, const Signature& sig) {
  if (sig.size() != kSignatureSize) return false;
  const mpz_class& n = GroupElement::order();
  Bytes commit_bytes(sig.begin(), sig.begin() + kGroupElementSize);
  if (!GroupElement::parseable(commit_bytes)) return false;
  GroupElement commit = GroupElement::parse(commit_bytes);
  mpz_class s;
  mpz_import(s.get_mpz_t(), 32, 1, 1, 1, 0, sig.data() + kGroupElementSize);
  if (s >= n) return false;

  Bytes challenge_input = commit_bytes;
  Bytes pk_bytes;
  try {
    pk_bytes = pk.serialize();
  } catch (const Error&) {
    return false;
  }
  append(challenge_input, pk_bytes);
  append(challenge_input, msg);
  mpz_class e;
  Bytes h = sha256(challenge_input);
  mpz_import(e.get_mpz_t(), h.size(), 1, 1, 1, 0, h.data());
  e %= n;

  return GroupElement::mul_generator(s) == commit.add(pk.mul(e));
}

}  // namespace sharvot
