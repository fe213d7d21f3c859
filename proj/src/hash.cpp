#include "sharvot/hash.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace sharvot {

Bytes sha256(const Bytes& data) {
  Bytes out(32);
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != 32) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

Bytes hmac_sha256(const Bytes& key, const Bytes& data) {
  constexpr size_t kBlock = 64;
  Bytes k = key;
  if (k.size() > kBlock) k = sha256(k);
  k.resize(kBlock, 0);
  Bytes ipad(kBlock), opad(kBlock);
  for (size_t i = 0; i < kBlock; ++i) {
    ipad[i] = k[i] ^ 0x36;
    opad[i] = k[i] ^ 0x5c;
  }
  Bytes inner = sha256(concat(ipad, data));
  return sha256(concat(opad, inner));
}

Bytes hash160(const Bytes& data) {
  Bytes d = sha256(sha256(data));
  d.resize(20);
  return d;
}

}  // namespace sharvot
