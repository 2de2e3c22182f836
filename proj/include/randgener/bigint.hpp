#pragma once

#include "randgener/digest.hpp"

#include <gmpxx.h>

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

namespace randgener {

using BigInt = mpz_class;

inline std::size_t bit_length(const BigInt& v) { return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2); }

/// Minimal-length big-endian bytes; zero encodes as the empty string.
inline Bytes to_bytes(const BigInt& v) {
  if (v < 0) throw Error(ErrorKind::invalid_argument, "negative integers are not serializable");
  if (v == 0) return {};
  Bytes out((bit_length(v) + 7) / 8);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(written);
  return out;
}

inline BigInt from_bytes(std::span<const std::uint8_t> data) {
  BigInt v;
  if (data.empty()) return v;
  mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  return v;
}

/// Length-prefixed (4-byte big-endian) minimal encoding used by every hash and transcript.
inline void put_bigint(Bytes& out, const BigInt& v) { put_prefixed(out, to_bytes(v)); }

inline Bytes serialize(const BigInt& v) {
  Bytes out;
  put_bigint(out, v);
  return out;
}

inline std::string to_hex(const BigInt& v) { return v == 0 ? std::string("0") : v.get_str(16); }

inline BigInt bigint_from_hex(std::string_view hex) {
  if (hex.empty()) throw Error(ErrorKind::parse, "empty hex integer");
  for (char c : hex)
    if (!std::isxdigit(static_cast<unsigned char>(c))) throw Error(ErrorKind::parse, "invalid hex integer");
  return BigInt(std::string(hex), 16);
}

// ---------------------------------------------------------------------------
// Operation counters
//
// A CountScope installs a counter for the current thread; group arithmetic
// below bumps it when present. Used to show sequential work without relying
// on wall-clock measurements.

struct OpCounter {
  std::uint64_t squarings = 0;        // sequential squaring steps (Eval, streaming Prove)
  std::uint64_t multiplications = 0;  // every other modular multiplication, squarings inside pow_mod included
};

namespace detail {
inline thread_local OpCounter* active_counter = nullptr;
}

class CountScope {
 public:
  explicit CountScope(OpCounter& counter) : previous_(detail::active_counter) { detail::active_counter = &counter; }
  ~CountScope() { detail::active_counter = previous_; }
  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

 private:
  OpCounter* previous_;
};

inline void count_squarings(std::uint64_t n) {
  if (detail::active_counter) detail::active_counter->squarings += n;
}
inline void count_multiplications(std::uint64_t n) {
  if (detail::active_counter) detail::active_counter->multiplications += n;
}

inline BigInt mul_mod(const BigInt& a, const BigInt& b, const BigInt& n) {
  BigInt r = a * b;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
  count_multiplications(1);
  return r;
}

/// Modular exponentiation. With a counter installed this runs left-to-right
/// binary exponentiation (bits(e)-1 squarings plus popcount(e)-1
/// multiplications, all counted); without one it defers to GMP's windowed
/// Montgomery routine. Both return the same residue.
inline BigInt pow_mod(const BigInt& base, const BigInt& e, const BigInt& n) {
  if (e < 0) throw Error(ErrorKind::invalid_argument, "negative exponent");
  if (n == 1) return 0;
  if (e == 0) return 1;
  BigInt b = base % n;
  if (b < 0) b += n;
  if (!detail::active_counter) {
    BigInt r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
    return r;
  }
  BigInt acc = b;
  std::uint64_t ops = 0;
  for (auto i = static_cast<long>(bit_length(e)) - 2; i >= 0; --i) {
    acc *= acc;
    mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), n.get_mpz_t());
    ++ops;
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      acc *= b;
      mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), n.get_mpz_t());
      ++ops;
    }
  }
  count_multiplications(ops);
  return acc;
}

/// 2^e mod m, for exponents that only exist as a 64-bit count.
inline BigInt pow2_mod(std::uint64_t e, const BigInt& m) {
  BigInt r;
  BigInt two = 2;
  BigInt exp;
  mpz_import(exp.get_mpz_t(), 1, 1, sizeof(e), 0, 0, &e);
  mpz_powm(r.get_mpz_t(), two.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// ---------------------------------------------------------------------------
// Primality

inline constexpr std::array<unsigned, 303> small_primes = [] {
  std::array<unsigned, 303> out{};
  std::size_t k = 0;
  for (unsigned c = 2; k < out.size(); ++c) {
    bool prime = true;
    for (unsigned d = 2; d * d <= c; ++d)
      if (c % d == 0) {
        prime = false;
        break;
      }
    if (prime) out[k++] = c;
  }
  return out;
}();

namespace detail {

inline bool mr_round(const BigInt& n, const BigInt& n_minus_1, const BigInt& d, unsigned s, const BigInt& a) {
  BigInt x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

}  // namespace detail

/// Miller-Rabin with `rounds` bases. Below 3.3e24 the fixed prime bases make
/// the answer exact; above, bases are hash-derived from n so the verdict is a
/// pure function of n (error <= 4^-rounds).
inline bool is_probable_prime(const BigInt& n, unsigned rounds = 64) {
  if (n < 2) return false;
  for (unsigned p : small_primes) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  BigInt n_minus_1 = n - 1;
  BigInt d = n_minus_1;
  unsigned s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++s;
  }
  static constexpr unsigned fixed_bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (unsigned a : fixed_bases)
    if (!detail::mr_round(n, n_minus_1, d, s, BigInt(a))) return false;
  static const BigInt exact_bound("3317044064679887385961981", 10);
  if (n < exact_bound) return true;

  Bytes seed;
  put_prefixed(seed, std::string_view("miller-rabin"));
  put_bigint(seed, n);
  auto stream = expand(seed, static_cast<std::size_t>(rounds) * ((bit_length(n) + 7) / 8 + 8));
  std::size_t chunk = stream.size() / rounds;
  BigInt span = n - 3;
  for (unsigned i = 0; i < rounds; ++i) {
    BigInt a = from_bytes(std::span(stream).subspan(i * chunk, chunk)) % span + 2;
    if (!detail::mr_round(n, n_minus_1, d, s, a)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Deterministic randomness

/// Counter-based derivation tree. Children are derived by label and index so
/// that sub-seeds for distinct participants and rounds are independent.
class SeedSource {
 public:
  explicit SeedSource(std::uint64_t seed) {
    Bytes b;
    put_prefixed(b, std::string_view("randgener-seed"));
    put_u64(b, seed);
    key_ = sha256(b);
  }
  explicit SeedSource(const Digest32& key) : key_(key) {}

  SeedSource derive(std::string_view label, std::uint64_t index = 0) const {
    Bytes b(key_.begin(), key_.end());
    put_prefixed(b, label);
    put_u64(b, index);
    return SeedSource(sha256(b));
  }

  Bytes next_bytes(std::size_t n) {
    Bytes b(key_.begin(), key_.end());
    put_u64(b, counter_++);
    return expand(b, n);
  }

  /// Uniform integer with at most `bits` bits.
  BigInt next_bits(std::size_t bits) {
    auto raw = next_bytes((bits + 7) / 8);
    BigInt v = from_bytes(raw);
    auto excess = raw.size() * 8 - bits;
    if (excess) v >>= static_cast<mp_bitcnt_t>(excess);
    return v;
  }

  /// Uniform integer in [0, bound) by rejection.
  BigInt next_below(const BigInt& bound) {
    auto bits = bit_length(bound);
    for (;;) {
      BigInt v = next_bits(bits);
      if (v < bound) return v;
    }
  }

  const Digest32& key() const { return key_; }

 private:
  Digest32 key_{};
  std::uint64_t counter_ = 0;
};

}  // namespace randgener
