#pragma once

#include <cstdint>
#include <string_view>

namespace cadseq::detail {

// 64-bit FNV-1a over 64-bit words and bytes.
struct Fnv {
  std::uint64_t value = 0xcbf29ce484222325ULL;

  void add(std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      value ^= (word >> (8 * i)) & 0xFF;
      value *= 0x100000001b3ULL;
    }
  }
  void add(std::string_view text) {
    for (const char c : text) {
      value ^= static_cast<unsigned char>(c);
      value *= 0x100000001b3ULL;
    }
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace cadseq::detail
