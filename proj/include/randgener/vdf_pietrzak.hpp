#pragma once

#include "randgener/vdf_core.hpp"

#include <vector>

namespace randgener {

/// Midpoints u_1..u_k in recursion order, largest T first; k = log2(T).
struct PietrzakProof {
  std::vector<BigInt> midpoints;
  Watermark mu;

  friend bool operator==(const PietrzakProof&, const PietrzakProof&) = default;
};

namespace detail {

inline void require_pow2(std::uint64_t t) {
  if (t == 0 || !std::has_single_bit(t)) throw Error(ErrorKind::invalid_argument, "T must be a power of two");
}

struct PietrzakLevel {
  GroupElement x;
  GroupElement y;
};

// One halving step. `midpoint` computes u = x^(2^(T/2)); the fold uses `pow`
// so the trapdoor variant can reduce exponents mod phi(N).
template <typename Midpoint, typename Pow>
void pietrzak_prove_level(PietrzakLevel level, std::uint64_t t, const Watermark& mu, const HashSuiteId& suite,
                          Midpoint&& midpoint, Pow&& pow, std::vector<BigInt>& acc) {
  if (t == 1) return;
  const std::uint64_t half = t / 2;
  GroupElement u = midpoint(level.x, half);
  BigInt r = h_random(level.x, half, level.y, u, mu, suite);
  PietrzakLevel next{pow(level.x, r) * u, pow(u, r) * level.y};
  acc.push_back(u.value());
  pietrzak_prove_level(std::move(next), half, mu, suite, midpoint, pow, acc);
}

}  // namespace detail

inline PietrzakProof pie_prove(const PublicParams& pp, const GroupElement& x, const Watermark& mu,
                               const GroupElement& y, const Bytes& /*advice*/, std::uint64_t t,
                               std::stop_token stop = {}) {
  detail::require_pow2(t);
  require_member(pp, x);
  require_member(pp, y);
  PietrzakProof proof{{}, mu};
  proof.midpoints.reserve(static_cast<std::size_t>(std::countr_zero(t)));
  detail::pietrzak_prove_level(
      {x, y}, t, mu, pp.hash_suite,
      [&](const GroupElement& base, std::uint64_t half) { return rsw_eval(pp.modulus, half, base, stop); },
      [](const GroupElement& base, const BigInt& e) { return base.pow(e); }, proof.midpoints);
  return proof;
}

inline PietrzakProof pie_td_prove(const PublicParams& pp, const Trapdoor& td, const GroupElement& x,
                                  const Watermark& mu, const GroupElement& y, const Bytes& /*advice*/,
                                  std::uint64_t t) {
  detail::require_pow2(t);
  require_trapdoor(pp.modulus, td);
  require_member(pp, x);
  require_member(pp, y);
  PietrzakProof proof{{}, mu};
  proof.midpoints.reserve(static_cast<std::size_t>(std::countr_zero(t)));
  detail::pietrzak_prove_level(
      {x, y}, t, mu, pp.hash_suite,
      [&](const GroupElement& base, std::uint64_t half) { return base.pow(pow2_mod(half, td.phi_n)); },
      [&](const GroupElement& base, const BigInt& e) { return base.pow(BigInt(e % td.phi_n)); }, proof.midpoints);
  return proof;
}

/// Walks the midpoints, re-deriving each r from the level's (x, T/2, y, u, mu)
/// before folding; at T = 1 accepts iff y = x^2.
inline bool pie_verify(const PublicParams& pp, const GroupElement& x, const Watermark& mu, const GroupElement& y,
                       const PietrzakProof& proof, std::uint64_t t) {
  if (t == 0 || !std::has_single_bit(t)) return false;
  if (proof.midpoints.size() != static_cast<std::size_t>(std::countr_zero(t))) return false;
  if (x.modulus() != pp.n() || y.modulus() != pp.n()) return false;
  GroupElement cur_x = x;
  GroupElement cur_y = y;
  for (const auto& raw : proof.midpoints) {
    auto u = GroupElement::try_in(pp.n(), raw);
    if (!u) return false;
    const std::uint64_t half = t / 2;
    BigInt r = h_random(cur_x, half, cur_y, *u, mu, pp.hash_suite);
    GroupElement next_x = cur_x.pow(r) * *u;
    GroupElement next_y = u->pow(r) * cur_y;
    cur_x = std::move(next_x);
    cur_y = std::move(next_y);
    t = half;
  }
  return cur_y == cur_x.squared();
}

}  // namespace randgener
