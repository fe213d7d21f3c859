#pragma once

#include "sharvot/ff.hpp"

namespace sharvot {

class Rng;

// One point (x, f(x)) of a sharing; doubles as a voter's ballot token.
struct Share {
  FieldElement x;
  FieldElement y;

  bool operator==(const Share&) const = default;

  // fixed-width big-endian x||y, each ceil(bits(p)/8) bytes
  Bytes to_bytes() const;
  static Share from_bytes(const Bytes& data, const mpz_class& modulus);
};

struct SharingConfig {
  unsigned t;   // polynomial degree; t+1 shares reconstruct
  unsigned n;   // number of shares issued, at x = 1..n
  mpz_class p;  // prime field modulus

  void validate() const;  // throws Err::InvalidConfig unless 0 <= t < n < p
};

std::vector<Share> split_secret(const FieldElement& secret, const SharingConfig& cfg,
                                Rng& rng);

// Lagrange interpolation of the unique degree-<=t polynomial through the
// shares, evaluated at x0.  With more than t+1 shares the extras must be
// consistent with the interpolated polynomial.
FieldElement interpolate_at(const std::vector<Share>& shares, const FieldElement& x0,
                            const SharingConfig& cfg);

FieldElement reconstruct_secret(const std::vector<Share>& shares, const SharingConfig& cfg);

}  // namespace sharvot
