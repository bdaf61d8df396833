#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexmap {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; line is 1-based, 0 means end-of-file.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line) : Error(what), line(line) {}
  std::size_t line;
};

// All randomized behavior in the library goes through mt19937_64 with the
// draw helpers below, so a fixed seed reproduces byte-identical artifacts.
using Rng = std::mt19937_64;

inline double rand_unit(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform in [0, n) without modulo bias. n must be >= 1.
inline std::size_t rand_below(Rng& g, std::size_t n) {
  const std::uint64_t m = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
  std::uint64_t x = g();
  while (x >= limit) x = g();
  return static_cast<std::size_t>(x % m);
}

// Fisher-Yates; std::shuffle is implementation-defined, this is not.
template <typename T>
void shuffle_deterministic(std::vector<T>& v, Rng& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rand_below(g, i)]);
  }
}

}  // namespace lexmap
