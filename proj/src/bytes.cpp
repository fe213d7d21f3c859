#include "sharvot/bytes.hpp"

#include <algorithm>

#include "sharvot/error.hpp"

namespace sharvot {

static const char* kHexDigits = "0123456789abcdef";

std::string to_hex(const Bytes& data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

static int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw Error(Err::ParseError, "odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_val(hex[i]), lo = hex_val(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(Err::ParseError, "invalid hex digit");
    out.push_back(static_cast<uint8_t>((hi << 4) | lo));
  }
  return out;
}

void append_u16_be(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void append_u32_be(Bytes& out, uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

void append_u64_be(Bytes& out, uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

static void check_len(const Bytes& in, size_t off, size_t need) {
  if (off + need > in.size()) throw Error(Err::ParseError, "truncated input");
}

uint16_t read_u16_be(const Bytes& in, size_t off) {
  check_len(in, off, 2);
  return static_cast<uint16_t>((in[off] << 8) | in[off + 1]);
}

uint32_t read_u32_be(const Bytes& in, size_t off) {
  check_len(in, off, 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in[off + i];
  return v;
}

uint64_t read_u64_be(const Bytes& in, size_t off) {
  check_len(in, off, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[off + i];
  return v;
}

bool contains_bytes(const Bytes& haystack, const Bytes& needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

const char* err_name(Err e) {
  switch (e) {
    case Err::InvalidConfig: return "invalid-config";
    case Err::ModulusMismatch: return "modulus-mismatch";
    case Err::InsufficientShares: return "insufficient-shares";
    case Err::DuplicateShareX: return "duplicate-x";
    case Err::InconsistentShares: return "inconsistent-shares";
    case Err::AuthenticationFailure: return "authentication-failure";
    case Err::KeyTooShort: return "key-too-short";
    case Err::WidthMismatch: return "width-mismatch";
    case Err::MalformedPlaintext: return "malformed-plaintext";
    case Err::SlotOverflow: return "slot-overflow";
    case Err::MetadataOversize: return "metadata-oversize";
    case Err::ScriptTooLarge: return "script-too-large";
    case Err::ParseError: return "parse-error";
    case Err::PhaseViolation: return "phase-violation";
    case Err::DecryptionFailure: return "decryption-failure";
    case Err::EntryNotFound: return "entry-not-found";
    case Err::ProtocolAbort: return "protocol-abort";
    case Err::DoubleVote: return "double-vote";
    case Err::MissingFunding: return "missing-funding";
    case Err::VoterVerificationFailure: return "voter-verification-failure";
  }
  return "unknown";
}

}  // namespace sharvot
