#include "sharvot/shamir.hpp"

#include <set>

#include "sharvot/rng.hpp"

namespace sharvot {

Bytes Share::to_bytes() const {
  size_t w = FieldElement::byte_width(x.modulus());
  Bytes out = x.to_bytes(w);
  append(out, y.to_bytes(w));
  return out;
}

Share Share::from_bytes(const Bytes& data, const mpz_class& modulus) {
  size_t w = FieldElement::byte_width(modulus);
  if (data.size() != 2 * w) throw Error(Err::ParseError, "bad share encoding length");
  Bytes xb(data.begin(), data.begin() + w);
  Bytes yb(data.begin() + w, data.end());
  return {FieldElement::from_bytes(xb, modulus), FieldElement::from_bytes(yb, modulus)};
}

void SharingConfig::validate() const {
  if (n == 0 || t >= n) throw Error(Err::InvalidConfig, "need 0 <= t < n");
  if (mpz_class(n) >= p) throw Error(Err::InvalidConfig, "need n < p");
  if (mpz_probab_prime_p(p.get_mpz_t(), 25) == 0)
    throw Error(Err::InvalidConfig, "field modulus must be prime");
}

std::vector<Share> split_secret(const FieldElement& secret, const SharingConfig& cfg,
                                Rng& rng) {
  cfg.validate();
  if (secret.modulus() != cfg.p)
    throw Error(Err::ModulusMismatch, "secret not in the configured field");
  Polynomial f = Polynomial::random(secret, cfg.t, rng);
  std::vector<Share> shares;
  shares.reserve(cfg.n);
  for (unsigned i = 1; i <= cfg.n; ++i) {
    FieldElement xi(i, cfg.p);
    shares.push_back({xi, f.evaluate(xi)});
  }
  return shares;
}

static void check_shares(const std::vector<Share>& shares, const SharingConfig& cfg) {
  if (shares.size() < cfg.t + 1)
    throw Error(Err::InsufficientShares, "need at least t+1 shares");
  std::set<mpz_class> xs;
  for (const auto& s : shares) {
    if (s.x.modulus() != cfg.p || s.y.modulus() != cfg.p)
      throw Error(Err::ModulusMismatch, "share not in the configured field");
    if (!xs.insert(s.x.value()).second)
      throw Error(Err::DuplicateShareX, "repeated evaluation point");
  }
}

static FieldElement lagrange_eval(const std::vector<Share>& pts, const FieldElement& x0) {
  FieldElement acc(0, x0.modulus());
  for (size_t i = 0; i < pts.size(); ++i) {
    FieldElement num(1, x0.modulus()), den(1, x0.modulus());
    for (size_t j = 0; j < pts.size(); ++j) {
      if (j == i) continue;
      num = num * (x0 - pts[j].x);
      den = den * (pts[i].x - pts[j].x);
    }
    acc = acc + pts[i].y * (num / den);
  }
  return acc;
}

FieldElement interpolate_at(const std::vector<Share>& shares, const FieldElement& x0,
                            const SharingConfig& cfg) {
  check_shares(shares, cfg);
  std::vector<Share> basis(shares.begin(), shares.begin() + cfg.t + 1);
  // extra points must lie on the polynomial defined by the first t+1
  for (size_t i = cfg.t + 1; i < shares.size(); ++i) {
    if (lagrange_eval(basis, shares[i].x) != shares[i].y)
      throw Error(Err::InconsistentShares, "points do not lie on one degree-<=t polynomial");
  }
  return lagrange_eval(basis, x0);
}

FieldElement reconstruct_secret(const std::vector<Share>& shares, const SharingConfig& cfg) {
  return interpolate_at(shares, FieldElement(0, cfg.p), cfg);
}

}  // namespace sharvot
