#include "sharvot/rng.hpp"

#include <cstring>

#include "sharvot/hash.hpp"

namespace sharvot {

Rng::Rng(uint64_t seed) {
  Bytes s;
  append_u64_be(s, seed);
  Bytes k = sha256(s);
  std::memcpy(key_.data(), k.data(), 32);
}

Rng::Rng(const Bytes& seed) {
  Bytes k = sha256(seed);
  std::memcpy(key_.data(), k.data(), 32);
}

void Rng::refill() {
  Bytes block(key_.begin(), key_.end());
  append_u64_be(block, counter_++);
  buf_ = sha256(block);
  pos_ = 0;
}

void Rng::fill(uint8_t* out, size_t len) {
  size_t done = 0;
  while (done < len) {
    if (pos_ >= buf_.size()) refill();
    size_t take = std::min(len - done, buf_.size() - pos_);
    std::memcpy(out + done, buf_.data() + pos_, take);
    pos_ += take;
    done += take;
  }
}

Bytes Rng::bytes(size_t len) {
  Bytes out(len);
  fill(out.data(), len);
  return out;
}

uint64_t Rng::next_u64() {
  uint8_t b[8];
  fill(b, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
  return v;
}

uint64_t Rng::below(uint64_t bound) {
  if (bound <= 1) return 0;
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

mpz_class Rng::below_mpz(const mpz_class& bound) {
  if (bound <= 1) return 0;
  size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  size_t nbytes = (bits + 7) / 8;
  for (;;) {
    Bytes raw = bytes(nbytes);
    // mask excess high bits so rejection is cheap
    unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
    if (excess) raw[0] &= static_cast<uint8_t>(0xff >> excess);
    mpz_class v;
    mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 1, 0, raw.data());
    if (v < bound) return v;
  }
}

Rng Rng::child(const std::string& label) const {
  Bytes material(key_.begin(), key_.end());
  material.push_back(0xff);
  material.insert(material.end(), label.begin(), label.end());
  return Rng(material);
}

}  // namespace sharvot
