#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sharvot {

using Bytes = std::vector<uint8_t>;

std::string to_hex(const Bytes& data);
Bytes from_hex(const std::string& hex);  // throws Error(ParseError) on bad input

inline Bytes concat(const Bytes& a, const Bytes& b) {
  Bytes out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

template <typename T>
void append(std::vector<T>& out, const std::vector<T>& more) {
  out.insert(out.end(), more.begin(), more.end());
}

void append_u16_be(Bytes& out, uint16_t v);
void append_u32_be(Bytes& out, uint32_t v);
void append_u64_be(Bytes& out, uint64_t v);
uint16_t read_u16_be(const Bytes& in, size_t off);
uint32_t read_u32_be(const Bytes& in, size_t off);
uint64_t read_u64_be(const Bytes& in, size_t off);

// true iff `needle` occurs as a contiguous substring of `haystack`
bool contains_bytes(const Bytes& haystack, const Bytes& needle);

}  // namespace sharvot
