#pragma once

#include "randgener/vdf.hpp"

#include <cstring>
#include <tuple>

namespace randgener {

/// Golden vectors for the five hash roles. Written to disk only by the
/// `fixtures` command; the test suite compares fresh output against the file.
inline json golden_hash_fixtures() {
  const BigInt small_n = 77;
  const BigInt mid_n = BigInt(1019) * 1187;
  auto el = [](const BigInt& n, unsigned long v) { return GroupElement::in(n, BigInt(v)); };
  const Digest32 zeros{};

  json out;
  out["hash_suite"] = to_json(HashSuiteId{});

  json primes = json::array();
  for (const auto& [n, x, y, mu] : {std::tuple{small_n, 2ul, 25ul, "A"}, std::tuple{small_n, 2ul, 25ul, "B"},
                                    std::tuple{mid_n, 5ul, 123456ul, "participant-0"}}) {
    primes.push_back({{"N", to_hex(n)},
                      {"x", to_hex(BigInt(x))},
                      {"y", to_hex(BigInt(y))},
                      {"mu", to_hex(Bytes(mu, mu + std::strlen(mu)))},
                      {"prime", to_hex(h_prime(el(n, x), el(n, y), Watermark::from_string(mu)))}});
  }
  out["h_prime"] = primes;

  json randoms = json::array();
  for (const auto& [n, x, half, y, u, mu] :
       {std::tuple{small_n, 2ul, 1ul, 16ul, 4ul, "A"}, std::tuple{small_n, 2ul, 1ul, 16ul, 4ul, "B"},
        std::tuple{small_n, 3ul, 1ul, 16ul, 4ul, "A"}, std::tuple{mid_n, 5ul, 128ul, 77ul, 99ul, "A"}}) {
    randoms.push_back({{"N", to_hex(n)},
                       {"x", to_hex(BigInt(x))},
                       {"half_T", half},
                       {"y", to_hex(BigInt(y))},
                       {"u", to_hex(BigInt(u))},
                       {"mu", to_hex(Bytes(mu, mu + std::strlen(mu)))},
                       {"r", to_hex(h_random(el(n, x), half, el(n, y), el(n, u), Watermark::from_string(mu)))}});
  }
  out["h_random"] = randoms;

  json to_input = json::array();
  Digest32 ones;
  ones.fill(0xff);
  for (const auto& [prev, n] : {std::pair{zeros, small_n}, std::pair{zeros, mid_n}, std::pair{ones, mid_n}}) {
    to_input.push_back(
        {{"R_prev", to_hex(prev)}, {"N", to_hex(n)}, {"x", to_hex(h_rand_to_input(prev, RswModulus{n, 0}).value())}});
  }
  out["h_rand_to_input"] = to_input;

  json to_rand = json::array();
  for (unsigned long y : {1ul, 2ul, 400ul}) to_rand.push_back({{"y", to_hex(BigInt(y))}, {"R", to_hex(h_input_to_rand(y))}});
  out["h_input_to_rand"] = to_rand;

  json commits = json::array();
  for (const auto& [nonce, n, x] : {std::tuple{"nonce-0", small_n, 2ul}, std::tuple{"nonce-1", small_n, 2ul},
                                    std::tuple{"nonce-0", mid_n, 5ul}}) {
    Bytes nb(nonce, nonce + std::strlen(nonce));
    auto digest = h_commit(nb, el(n, x));
    commits.push_back({{"nonce", to_hex(nb)},
                       {"N", to_hex(n)},
                       {"x_r", to_hex(BigInt(x))},
                       {"digest", to_hex(digest)},
                       {"x_ri", to_hex(commit_to_group(digest, RswModulus{n, 0}).value())}});
  }
  out["h_commit"] = commits;
  return out;
}

}  // namespace randgener
