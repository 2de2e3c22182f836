#pragma once

#include "randgener/randgener.hpp"

#include <utility>
#include <vector>

namespace randgener::test {

/// Pinned 16-bit safe-prime pairs.
inline const std::vector<std::pair<long, long>>& pinned_primes() {
  static const std::vector<std::pair<long, long>> v{
      {32843, 32987}, {33107, 33347}, {64763, 65267}, {33623, 65147}, {64319, 65063}, {32987, 65123}};
  return v;
}

inline std::pair<PublicParams, Trapdoor> pinned(std::size_t i, std::uint64_t t, Scheme scheme) {
  const auto& [p, q] = pinned_primes().at(i);
  return vdf_setup_fixture(16, p, q, t, scheme);
}

inline std::pair<PublicParams, Trapdoor> n77(std::uint64_t t, Scheme scheme) {
  return vdf_setup_fixture(4, 7, 11, t, scheme);
}

inline std::vector<GroupElement> units(const BigInt& n) {
  std::vector<GroupElement> out;
  for (BigInt v = 1; v < n; ++v)
    if (auto e = GroupElement::try_in(n, v)) out.push_back(*e);
  return out;
}

}  // namespace randgener::test
