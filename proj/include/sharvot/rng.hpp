#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "sharvot/bytes.hpp"

namespace sharvot {

// Deterministic byte stream: SHA-256 in counter mode over a 32-byte key.
// Every piece of protocol randomness flows from one root seed through
// labelled child streams, so whole runs replay bit-exactly.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  explicit Rng(const Bytes& seed);

  void fill(uint8_t* out, size_t len);
  Bytes bytes(size_t len);
  uint64_t next_u64();

  // uniform in [0, bound), unbiased
  uint64_t below(uint64_t bound);
  mpz_class below_mpz(const mpz_class& bound);

  // independent stream derived from this one's key and a label
  Rng child(const std::string& label) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {  // Fisher-Yates
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::array<uint8_t, 32> key_{};
  uint64_t counter_ = 0;
  Bytes buf_;
  size_t pos_ = 0;
  void refill();
};

}  // namespace sharvot
