#pragma once

#include "randgener/num_core.hpp"

#include <algorithm>
#include <string>
#include <string_view>

namespace randgener {

/// Identifies the hash construction recorded in public parameters and
/// transcripts. Every role is SHA-256 with a distinct domain tag.
struct HashSuiteId {
  std::string name = "sha256";
  unsigned lambda = 256;

  /// Bit length of primes produced by h_prime.
  unsigned prime_bits() const { return std::min(lambda, 128u); }

  friend bool operator==(const HashSuiteId&, const HashSuiteId&) = default;
};

/// Evaluator identity bound into proofs; 1 to 64 opaque bytes.
class Watermark {
 public:
  Watermark() = default;
  explicit Watermark(Bytes bytes) : bytes_(std::move(bytes)) {
    if (bytes_.empty() || bytes_.size() > 64) throw Error(ErrorKind::invalid_argument, "watermark must be 1..64 bytes");
  }
  static Watermark from_string(std::string_view s) { return Watermark(Bytes(s.begin(), s.end())); }

  const Bytes& bytes() const { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }

  friend bool operator==(const Watermark&, const Watermark&) = default;

 private:
  Bytes bytes_;
};

namespace tags {
inline constexpr std::string_view prime = "Hprime";
inline constexpr std::string_view random = "Hrandom";
inline constexpr std::string_view rand_to_input = "HrandToinput";
inline constexpr std::string_view input_to_rand = "HinputTorand";
inline constexpr std::string_view commit = "Hcommit";
inline constexpr std::string_view commit_to_group = "HcommitToGroup";
}  // namespace tags

inline constexpr std::uint32_t prime_search_limit = 1u << 20;

namespace detail {

inline Bytes tagged(std::string_view tag) {
  Bytes b;
  put_prefixed(b, tag);
  return b;
}

inline void put_element(Bytes& out, const GroupElement& e) { put_bigint(out, e.value()); }

/// Shared rejection procedure: expand(tag || data || N || counter) reduced mod N,
/// retried with counter+1 until the residue lies in Z*_N.
inline GroupElement hash_to_group(std::string_view tag, std::span<const std::uint8_t> data, const RswModulus& m) {
  const std::size_t nbytes = (bit_length(m.n) + 7) / 8 + 16;
  for (std::uint32_t counter = 0; counter < sample_retry_cap; ++counter) {
    Bytes seed = tagged(tag);
    put_prefixed(seed, data);
    put_bigint(seed, m.n);
    put_u32(seed, counter);
    BigInt v = from_bytes(expand(seed, nbytes)) % m.n;
    if (auto e = GroupElement::try_in(m.n, v)) return *e;
  }
  throw Error(ErrorKind::search_exhausted, "hash-to-group exceeded retry cap");
}

}  // namespace detail

/// H_prime(x || y || mu): deterministic prime of exactly prime_bits() bits,
/// found by incrementing a hashed odd seed (top bit forced) by 2.
inline BigInt h_prime(const GroupElement& x, const GroupElement& y, const Watermark& mu, const HashSuiteId& suite = {}) {
  x.check_same_group(y);
  Bytes input = detail::tagged(tags::prime);
  detail::put_element(input, x);
  detail::put_element(input, y);
  put_prefixed(input, mu.bytes());
  const auto bits = suite.prime_bits();
  auto seed = sha256(input);
  BigInt cand = from_bytes(expand(seed, (bits + 7) / 8));
  if (auto excess = ((bits + 7) / 8) * 8 - bits) cand >>= excess;
  mpz_setbit(cand.get_mpz_t(), bits - 1);
  mpz_setbit(cand.get_mpz_t(), 0);
  for (std::uint32_t i = 0; i < prime_search_limit; ++i, cand += 2) {
    if (bit_length(cand) != bits) break;
    if (is_probable_prime(cand)) return cand;
  }
  throw Error(ErrorKind::search_exhausted, "hash-to-prime search exhausted");
}

/// H_random(x || T/2 || y || u || mu): uniform integer in [1, 2^lambda].
inline BigInt h_random(const GroupElement& x, std::uint64_t half_t, const GroupElement& y, const GroupElement& u,
                       const Watermark& mu, const HashSuiteId& suite = {}) {
  x.check_same_group(y);
  x.check_same_group(u);
  Bytes input = detail::tagged(tags::random);
  detail::put_element(input, x);
  put_u64(input, half_t);
  detail::put_element(input, y);
  detail::put_element(input, u);
  put_prefixed(input, mu.bytes());
  auto seed = sha256(input);
  return from_bytes(expand(seed, suite.lambda / 8)) + 1;
}

/// H_randToinput: maps a 32-byte beacon value into Z*_N.
inline GroupElement h_rand_to_input(const Digest32& prev_beacon, const RswModulus& m) {
  return detail::hash_to_group(tags::rand_to_input, prev_beacon, m);
}

/// H_inputTorand: 32-byte beacon value from the aggregated output.
inline Digest32 h_input_to_rand(const BigInt& y_combined) {
  if (y_combined < 1) throw Error(ErrorKind::invalid_argument, "aggregate must be positive");
  Bytes input = detail::tagged(tags::input_to_rand);
  put_bigint(input, y_combined);
  return sha256(input);
}

/// H(x'_{r,i} || x_r): commitment-input digest from a secret nonce.
inline Digest32 h_commit(std::span<const std::uint8_t> nonce, const GroupElement& x_r) {
  if (nonce.empty()) throw Error(ErrorKind::invalid_argument, "nonce must be non-empty");
  Bytes input = detail::tagged(tags::commit);
  put_prefixed(input, nonce);
  detail::put_element(input, x_r);
  return sha256(input);
}

/// Maps an h_commit digest into Z*_N with the same rejection procedure as
/// h_rand_to_input.
inline GroupElement commit_to_group(const Digest32& digest, const RswModulus& m) {
  return detail::hash_to_group(tags::commit_to_group, digest, m);
}

}  // namespace randgener
