#pragma once

#include "sharvot/bytes.hpp"

namespace sharvot {

Bytes sha256(const Bytes& data);
Bytes hmac_sha256(const Bytes& key, const Bytes& data);

// 20-byte script digest: double SHA-256 truncated to 20 bytes.
Bytes hash160(const Bytes& data);

}  // namespace sharvot
