#pragma once

#include <gmpxx.h>

#include <vector>

#include "sharvot/bytes.hpp"
#include "sharvot/error.hpp"

namespace sharvot {

class Rng;

// Element of the prime field F_p, kept in canonical form 0 <= value < p.
class FieldElement {
 public:
  FieldElement(mpz_class value, mpz_class modulus);

  const mpz_class& value() const { return value_; }
  const mpz_class& modulus() const { return modulus_; }
  bool is_zero() const { return value_ == 0; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;  // throws on division by zero
  FieldElement operator-() const;
  FieldElement inverse() const;
  bool operator==(const FieldElement& o) const = default;

  // fixed-width big-endian encoding; width defaults to the byte width of p
  Bytes to_bytes(size_t width = 0) const;
  static FieldElement from_bytes(const Bytes& data, const mpz_class& modulus);
  static size_t byte_width(const mpz_class& modulus);

 private:
  void check_same_field(const FieldElement& o) const;
  mpz_class value_;
  mpz_class modulus_;
};

class Polynomial {
 public:
  // coefficients a_0..a_t, constant term first
  explicit Polynomial(std::vector<FieldElement> coefficients);

  // random polynomial of exact degree t with the given constant term
  // (top coefficient resampled until nonzero when t >= 1)
  static Polynomial random(const FieldElement& constant_term, unsigned degree, Rng& rng);

  FieldElement evaluate(const FieldElement& x) const;
  unsigned degree() const { return static_cast<unsigned>(coefficients_.size() - 1); }
  const std::vector<FieldElement>& coefficients() const { return coefficients_; }

 private:
  std::vector<FieldElement> coefficients_;
};

}  // namespace sharvot
