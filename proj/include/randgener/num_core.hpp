#pragma once

#include "randgener/bigint.hpp"

#include <cstdint>
#include <concepts>
#include <optional>
#include <stop_token>
#include <type_traits>
#include <utility>

namespace randgener {

struct SafePrimePair {
  BigInt p;
  BigInt q;
  BigInt p_prime;
  BigInt q_prime;
};

struct RswModulus {
  BigInt n;
  unsigned lambda = 0;

  friend bool operator==(const RswModulus&, const RswModulus&) = default;
};

struct Trapdoor {
  BigInt p;
  BigInt q;
  BigInt phi_n;

  bool matches(const RswModulus& m) const { return p * q == m.n && phi_n == (p - 1) * (q - 1); }
};

/// Element of Z*_N stored as its canonical residue in [1, N-1].
class GroupElement {
 public:
  GroupElement() = default;

  /// Validating constructor; throws ErrorKind::malformed for non-canonical or
  /// non-coprime values.
  static GroupElement in(const BigInt& n, BigInt value) {
    if (value < 1 || value >= n) throw Error(ErrorKind::malformed, "group element not in [1, N-1]");
    if (gcd(value, n) != 1) throw Error(ErrorKind::malformed, "group element not coprime to N");
    return GroupElement(n, std::move(value));
  }
  static GroupElement in(const RswModulus& m, BigInt value) { return in(m.n, std::move(value)); }

  /// Non-throwing variant used by verifiers.
  static std::optional<GroupElement> try_in(const BigInt& n, BigInt value) {
    if (value < 1 || value >= n || gcd(value, n) != 1) return std::nullopt;
    return GroupElement(n, std::move(value));
  }

  const BigInt& value() const { return value_; }
  const BigInt& modulus() const { return n_; }

  GroupElement operator*(const GroupElement& o) const {
    check_same_group(o);
    return GroupElement(n_, mul_mod(value_, o.value_, n_));
  }
  GroupElement pow(const BigInt& e) const { return GroupElement(n_, pow_mod(value_, e, n_)); }
  GroupElement squared() const { return GroupElement(n_, mul_mod(value_, value_, n_)); }

  void check_same_group(const GroupElement& o) const {
    if (n_ != o.n_) throw Error(ErrorKind::invalid_argument, "group elements from different moduli");
  }

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.n_ == b.n_ && a.value_ == b.value_;
  }

 private:
  GroupElement(BigInt n, BigInt value) : n_(std::move(n)), value_(std::move(value)) {}

  BigInt n_;
  BigInt value_;
};

struct RswSetupOptions {
  std::uint64_t attempt_budget = 1u << 24;  // candidate p' draws per safe prime
  unsigned mr_rounds = 64;
};

namespace detail {

// Rejects p' when p' or 2p'+1 has a small factor. Cheap filter ahead of
// Miller-Rabin.
inline bool sieve_safe_candidate(const BigInt& p_prime) {
  for (unsigned s : small_primes) {
    if (p_prime <= s) break;
    unsigned long rem = mpz_fdiv_ui(p_prime.get_mpz_t(), s);
    if (rem == 0) return false;
    if (s > 2 && (2 * rem + 1) % s == 0) return false;
  }
  return true;
}

}  // namespace detail

/// Draws random p' of lambda-1 bits (top bit set, odd) until both p' and
/// p = 2p'+1 are prime; p then has exactly lambda bits.
inline std::pair<BigInt, BigInt> generate_safe_prime(unsigned lambda, SeedSource& rng,
                                                     const RswSetupOptions& opts = {}) {
  if (lambda < 3) throw Error(ErrorKind::invalid_argument, "safe prime needs at least 3 bits");
  const auto bits = lambda - 1;
  for (std::uint64_t attempt = 0; attempt < opts.attempt_budget; ++attempt) {
    BigInt cand = rng.next_bits(bits);
    mpz_setbit(cand.get_mpz_t(), bits - 1);
    mpz_setbit(cand.get_mpz_t(), 0);
    if (!detail::sieve_safe_candidate(cand)) continue;
    BigInt p = 2 * cand + 1;
    // Cheap base-2 screens before the full-strength tests.
    BigInt t;
    BigInt two = 2;
    BigInt e = cand - 1;
    mpz_powm(t.get_mpz_t(), two.get_mpz_t(), e.get_mpz_t(), cand.get_mpz_t());
    if (t != 1) continue;
    e = p - 1;
    mpz_powm(t.get_mpz_t(), two.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    if (t != 1) continue;
    if (is_probable_prime(cand, opts.mr_rounds) && is_probable_prime(p, opts.mr_rounds)) return {p, cand};
  }
  throw Error(ErrorKind::generation_timeout, "no safe prime found within attempt budget");
}

inline bool is_safe_prime(const BigInt& p, unsigned rounds = 64) {
  if (p < 5 || mpz_even_p(p.get_mpz_t())) return false;
  return is_probable_prime(p, rounds) && is_probable_prime((p - 1) / 2, rounds);
}

inline Trapdoor make_trapdoor(const BigInt& p, const BigInt& q) { return Trapdoor{p, q, (p - 1) * (q - 1)}; }

/// RSW.Setup: N = p*q for two distinct lambda-bit safe primes.
inline std::pair<RswModulus, Trapdoor> rsw_setup(unsigned lambda, SeedSource& rng,
                                                 const RswSetupOptions& opts = {}) {
  if (lambda < 16) throw Error(ErrorKind::invalid_argument, "lambda must be at least 16");
  auto [p, p_prime] = generate_safe_prime(lambda, rng, opts);
  for (;;) {
    auto [q, q_prime] = generate_safe_prime(lambda, rng, opts);
    if (q == p) continue;
    return {RswModulus{p * q, lambda}, make_trapdoor(p, q)};
  }
}

/// Fixture mode: explicit safe primes, no bit-length requirement.
inline std::pair<RswModulus, Trapdoor> rsw_setup_fixture(unsigned lambda, const BigInt& p, const BigInt& q) {
  if (p == q) throw Error(ErrorKind::invalid_argument, "fixture primes must differ");
  if (!is_safe_prime(p) || !is_safe_prime(q)) throw Error(ErrorKind::invalid_argument, "fixture primes must be safe primes");
  RswModulus m{p * q, lambda};
  if (m.n <= 8) throw Error(ErrorKind::invalid_argument, "modulus must exceed 8");
  return {m, make_trapdoor(p, q)};
}

inline SafePrimePair safe_prime_pair(const Trapdoor& td) { return {td.p, td.q, (td.p - 1) / 2, (td.q - 1) / 2}; }

inline constexpr unsigned sample_retry_cap = 128;

/// RSW.Sample over an arbitrary candidate stream; rejects residues that are
/// zero or share a factor with N.
template <typename CandidateSource>
  requires std::invocable<CandidateSource&> && std::convertible_to<std::invoke_result_t<CandidateSource&>, BigInt>
GroupElement rsw_sample(const RswModulus& m, CandidateSource&& next) {
  for (unsigned attempt = 0; attempt < sample_retry_cap; ++attempt) {
    BigInt c = BigInt(next()) % m.n;
    if (c < 0) c += m.n;
    if (auto e = GroupElement::try_in(m.n, c)) return *e;
  }
  throw Error(ErrorKind::search_exhausted, "sampling exceeded retry cap");
}

inline GroupElement rsw_sample(const RswModulus& m, SeedSource& rng) {
  return rsw_sample(m, [&] { return rng.next_bits(bit_length(m.n) + 128); });
}

inline constexpr std::uint64_t cancel_check_interval = 1u << 12;

/// RSW.Eval: x^(2^T) mod N by exactly T sequential squarings.
inline GroupElement rsw_eval(const RswModulus& m, std::uint64_t t, const GroupElement& x, std::stop_token stop = {}) {
  if (t < 1) throw Error(ErrorKind::invalid_argument, "T must be at least 1");
  if (x.modulus() != m.n) throw Error(ErrorKind::invalid_argument, "element not in this group");
  BigInt acc = x.value();
  mpz_ptr a = acc.get_mpz_t();
  mpz_srcptr n = m.n.get_mpz_t();
  for (std::uint64_t i = 0; i < t; ++i) {
    mpz_mul(a, a, a);
    mpz_mod(a, a, n);
    if ((i + 1) % cancel_check_interval == 0 && stop.stop_requested()) {
      count_squarings(i + 1);
      throw Error(ErrorKind::cancelled, "evaluation cancelled");
    }
  }
  count_squarings(t);
  return GroupElement::in(m, std::move(acc));
}

inline void require_trapdoor(const RswModulus& m, const Trapdoor& td) {
  if (!td.matches(m)) throw Error(ErrorKind::trapdoor_mismatch, "trapdoor does not match modulus");
}

/// RSW.tdEval: v = 2^T mod phi(N), then x^v mod N.
inline GroupElement rsw_td_eval(const RswModulus& m, const Trapdoor& td, std::uint64_t t, const GroupElement& x) {
  require_trapdoor(m, td);
  if (x.modulus() != m.n) throw Error(ErrorKind::invalid_argument, "element not in this group");
  return x.pow(pow2_mod(t, td.phi_n));
}

}  // namespace randgener
