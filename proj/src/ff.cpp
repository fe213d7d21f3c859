#include "sharvot/ff.hpp"

#include "sharvot/rng.hpp"

namespace sharvot {

FieldElement::FieldElement(mpz_class value, mpz_class modulus)
    : value_(std::move(value)), modulus_(std::move(modulus)) {
  if (modulus_ < 2) throw Error(Err::InvalidConfig, "field modulus must be >= 2");
  mpz_mod(value_.get_mpz_t(), value_.get_mpz_t(), modulus_.get_mpz_t());
}

void FieldElement::check_same_field(const FieldElement& o) const {
  if (modulus_ != o.modulus_)
    throw Error(Err::ModulusMismatch, "operands from different fields");
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same_field(o);
  return {value_ + o.value_, modulus_};
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same_field(o);
  return {value_ - o.value_, modulus_};
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same_field(o);
  return {value_ * o.value_, modulus_};
}

FieldElement FieldElement::operator-() const { return {-value_, modulus_}; }

FieldElement FieldElement::inverse() const {
  if (value_ == 0) throw Error(Err::InvalidConfig, "zero has no inverse");
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), value_.get_mpz_t(), modulus_.get_mpz_t()) == 0)
    throw Error(Err::InvalidConfig, "element not invertible (modulus not prime?)");
  return {inv, modulus_};
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
  check_same_field(o);
  return *this * o.inverse();
}

size_t FieldElement::byte_width(const mpz_class& modulus) {
  return (mpz_sizeinbase(modulus.get_mpz_t(), 2) + 7) / 8;
}

Bytes FieldElement::to_bytes(size_t width) const {
  if (width == 0) width = byte_width(modulus_);
  Bytes raw((mpz_sizeinbase(value_.get_mpz_t(), 2) + 7) / 8, 0);
  size_t count = 0;
  if (value_ != 0)
    mpz_export(raw.data(), &count, 1, 1, 1, 0, value_.get_mpz_t());
  raw.resize(count);
  if (count > width) throw Error(Err::WidthMismatch, "value wider than requested encoding");
  Bytes out(width - count, 0);
  append(out, raw);
  return out;
}

FieldElement FieldElement::from_bytes(const Bytes& data, const mpz_class& modulus) {
  mpz_class v;
  if (!data.empty()) mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  if (v >= modulus) throw Error(Err::ParseError, "encoded value exceeds modulus");
  return {v, modulus};
}

Polynomial::Polynomial(std::vector<FieldElement> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty())
    throw Error(Err::InvalidConfig, "polynomial needs at least one coefficient");
  for (const auto& c : coefficients_)
    if (c.modulus() != coefficients_[0].modulus())
      throw Error(Err::ModulusMismatch, "mixed-field coefficients");
}

Polynomial Polynomial::random(const FieldElement& constant_term, unsigned degree, Rng& rng) {
  const mpz_class& p = constant_term.modulus();
  std::vector<FieldElement> coeffs;
  coeffs.reserve(degree + 1);
  coeffs.push_back(constant_term);
  for (unsigned j = 1; j <= degree; ++j)
    coeffs.emplace_back(rng.below_mpz(p), p);
  if (degree >= 1) {
    while (coeffs.back().is_zero())  // exact degree t
      coeffs.back() = FieldElement(rng.below_mpz(p), p);
  }
  return Polynomial(std::move(coeffs));
}

FieldElement Polynomial::evaluate(const FieldElement& x) const {
  // Horner
  FieldElement acc = coefficients_.back();
  for (size_t i = coefficients_.size() - 1; i-- > 0;)
    acc = acc * x + coefficients_[i];
  return acc;
}

}  // namespace sharvot
