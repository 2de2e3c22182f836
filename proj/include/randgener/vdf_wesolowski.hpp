#pragma once

#include "randgener/vdf_core.hpp"

namespace randgener {

/// pi = x^floor(2^T / l) with l = H_prime(x || y || mu). The proof element is
/// kept as a raw integer so that the verifier, not the parser, decides
/// whether a received value is a valid group element.
struct WesolowskiProof {
  BigInt pi;
  Watermark mu;

  friend bool operator==(const WesolowskiProof&, const WesolowskiProof&) = default;
};

namespace detail {

// Streaming long division of 2^T by l: each step squares the accumulator and
// multiplies in x when the next quotient bit is 1. T squarings total.
inline BigInt wes_prove_with_prime(const GroupElement& x, const BigInt& l, std::uint64_t t, std::stop_token stop) {
  const BigInt& n = x.modulus();
  BigInt pi = 1;
  BigInt rem = 1;
  std::uint64_t mults = 0;
  for (std::uint64_t i = 0; i < t; ++i) {
    pi *= pi;
    mpz_mod(pi.get_mpz_t(), pi.get_mpz_t(), n.get_mpz_t());
    rem <<= 1;
    if (rem >= l) {
      rem -= l;
      pi *= x.value();
      mpz_mod(pi.get_mpz_t(), pi.get_mpz_t(), n.get_mpz_t());
      ++mults;
    }
    if ((i + 1) % cancel_check_interval == 0 && stop.stop_requested()) {
      count_squarings(i + 1);
      count_multiplications(mults);
      throw Error(ErrorKind::cancelled, "proof generation cancelled");
    }
  }
  count_squarings(t);
  count_multiplications(mults);
  return pi;
}

// floor(2^T / l) mod phi = ((2^T mod l*phi) - (2^T mod l)) / l.
inline BigInt wes_td_prove_with_prime(const GroupElement& x, const Trapdoor& td, const BigInt& l, std::uint64_t t) {
  BigInt m = pow2_mod(t, l * td.phi_n);
  BigInt r = m % l;
  BigInt q = (m - r) / l;
  return x.pow(q).value();
}

inline bool wes_verify_with_prime(const GroupElement& x, const GroupElement& y, const BigInt& pi_value, const BigInt& l,
                                  std::uint64_t t) {
  auto pi = GroupElement::try_in(x.modulus(), pi_value);
  if (!pi) return false;
  BigInt r = pow2_mod(t, l);
  return pi->pow(l) * x.pow(r) == y;
}

}  // namespace detail

inline WesolowskiProof wes_prove(const PublicParams& pp, const GroupElement& x, const Watermark& mu,
                                 const GroupElement& y, const Bytes& /*advice*/, std::uint64_t t,
                                 std::stop_token stop = {}) {
  require_member(pp, x);
  require_member(pp, y);
  BigInt l = h_prime(x, y, mu, pp.hash_suite);
  return {detail::wes_prove_with_prime(x, l, t, stop), mu};
}

inline WesolowskiProof wes_td_prove(const PublicParams& pp, const Trapdoor& td, const GroupElement& x,
                                    const Watermark& mu, const GroupElement& y, const Bytes& /*advice*/,
                                    std::uint64_t t) {
  require_trapdoor(pp.modulus, td);
  require_member(pp, x);
  require_member(pp, y);
  BigInt l = h_prime(x, y, mu, pp.hash_suite);
  return {detail::wes_td_prove_with_prime(x, td, l, t), mu};
}

/// Accept iff pi^l * x^(2^T mod l) == y, with l recomputed from (x, y, mu).
/// Cost is independent of T apart from the 64-bit exponent 2^T mod l.
inline bool wes_verify(const PublicParams& pp, const GroupElement& x, const Watermark& mu, const GroupElement& y,
                       const WesolowskiProof& proof, std::uint64_t t) {
  if (x.modulus() != pp.n() || y.modulus() != pp.n()) return false;
  BigInt l = h_prime(x, y, mu, pp.hash_suite);
  return detail::wes_verify_with_prime(x, y, proof.pi, l, t);
}

#ifdef RANDGENER_TEST_HOOKS
// Prime-injection hooks for hand-checkable vectors; test builds only.
namespace test_hooks {
inline WesolowskiProof wes_prove_injected(const GroupElement& x, const Watermark& mu, const BigInt& l, std::uint64_t t) {
  return {detail::wes_prove_with_prime(x, l, t, {}), mu};
}
inline WesolowskiProof wes_td_prove_injected(const GroupElement& x, const Trapdoor& td, const Watermark& mu,
                                             const BigInt& l, std::uint64_t t) {
  return {detail::wes_td_prove_with_prime(x, td, l, t), mu};
}
inline bool wes_verify_injected(const GroupElement& x, const GroupElement& y, const WesolowskiProof& proof,
                                const BigInt& l, std::uint64_t t) {
  return detail::wes_verify_with_prime(x, y, proof.pi, l, t);
}
}  // namespace test_hooks
#endif

}  // namespace randgener
