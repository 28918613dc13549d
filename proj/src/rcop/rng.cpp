#include "rcop/rng.hpp"

namespace rcop {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
  // FNV-1a over the purpose tag, then mixed with seed and index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ h);
  s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return Rng(s);
}

}  // namespace rcop
