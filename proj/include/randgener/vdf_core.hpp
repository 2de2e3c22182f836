#pragma once

#include "randgener/hash_suite.hpp"

#include <bit>
#include <string_view>

namespace randgener {

enum class Scheme { wesolowski, pietrzak };

inline std::string_view scheme_name(Scheme s) { return s == Scheme::wesolowski ? "wesolowski" : "pietrzak"; }

inline Scheme parse_scheme(std::string_view name) {
  if (name == "wesolowski") return Scheme::wesolowski;
  if (name == "pietrzak") return Scheme::pietrzak;
  throw Error(ErrorKind::invalid_argument, "unknown scheme: " + std::string(name));
}

/// Smallest power of two >= t.
inline std::uint64_t round_up_pow2(std::uint64_t t) { return std::bit_ceil(t); }

struct PublicParams {
  RswModulus modulus;
  std::uint64_t t = 0;
  HashSuiteId hash_suite;
  Scheme scheme = Scheme::wesolowski;

  const BigInt& n() const { return modulus.n; }

  void validate() const {
    if (t < 2) throw Error(ErrorKind::invalid_argument, "T must be at least 2");
    if (scheme == Scheme::pietrzak && !std::has_single_bit(t))
      throw Error(ErrorKind::invalid_argument, "pietrzak requires T to be a power of two");
    if (hash_suite.lambda == 0 || hash_suite.lambda % 8 != 0)
      throw Error(ErrorKind::invalid_argument, "hash lambda must be a positive multiple of 8");
  }

  friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

/// (y, alpha). The advice string is carried for interface fidelity; neither
/// proof scheme needs anything beyond y, so it is always empty here.
struct EvalOutput {
  GroupElement y;
  Bytes advice;
};

inline std::pair<PublicParams, Trapdoor> vdf_setup(unsigned lambda, std::uint64_t t, Scheme scheme, SeedSource& rng,
                                                   const RswSetupOptions& opts = {}, HashSuiteId suite = {}) {
  PublicParams pp{{}, t, std::move(suite), scheme};
  pp.validate();
  auto [modulus, td] = rsw_setup(lambda, rng, opts);
  pp.modulus = std::move(modulus);
  return {std::move(pp), std::move(td)};
}

inline std::pair<PublicParams, Trapdoor> vdf_setup_fixture(unsigned lambda, const BigInt& p, const BigInt& q,
                                                           std::uint64_t t, Scheme scheme, HashSuiteId suite = {}) {
  PublicParams pp{{}, t, std::move(suite), scheme};
  pp.validate();
  auto [modulus, td] = rsw_setup_fixture(lambda, p, q);
  pp.modulus = std::move(modulus);
  return {std::move(pp), std::move(td)};
}

inline GroupElement vdf_sample(const PublicParams& pp, SeedSource& rng) { return rsw_sample(pp.modulus, rng); }

inline void require_member(const PublicParams& pp, const GroupElement& x) {
  if (x.modulus() != pp.n()) throw Error(ErrorKind::invalid_argument, "input not in this participant's group");
}

inline EvalOutput vdf_eval(const PublicParams& pp, const GroupElement& x, std::stop_token stop = {}) {
  require_member(pp, x);
  return {rsw_eval(pp.modulus, pp.t, x, stop), {}};
}

inline EvalOutput vdf_td_eval(const PublicParams& pp, const Trapdoor& td, const GroupElement& x) {
  require_member(pp, x);
  return {rsw_td_eval(pp.modulus, td, pp.t, x), {}};
}

}  // namespace randgener
