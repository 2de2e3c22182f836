#pragma once

#include "randgener/vdf_pietrzak.hpp"
#include "randgener/vdf_wesolowski.hpp"

#include "json.hpp"

#include <variant>

namespace randgener {

using json = nlohmann::json;

/// Scheme-tagged watermarked proof.
using Proof = std::variant<WesolowskiProof, PietrzakProof>;

inline Scheme proof_scheme(const Proof& p) {
  return std::holds_alternative<WesolowskiProof>(p) ? Scheme::wesolowski : Scheme::pietrzak;
}

inline const Watermark& proof_mu(const Proof& p) {
  return std::visit([](const auto& v) -> const Watermark& { return v.mu; }, p);
}

inline Proof vdf_prove(const PublicParams& pp, const GroupElement& x, const Watermark& mu, const EvalOutput& out,
                       std::stop_token stop = {}) {
  if (pp.scheme == Scheme::wesolowski) return wes_prove(pp, x, mu, out.y, out.advice, pp.t, stop);
  return pie_prove(pp, x, mu, out.y, out.advice, pp.t, stop);
}

inline Proof vdf_td_prove(const PublicParams& pp, const Trapdoor& td, const GroupElement& x, const Watermark& mu,
                          const EvalOutput& out) {
  if (pp.scheme == Scheme::wesolowski) return wes_td_prove(pp, td, x, mu, out.y, out.advice, pp.t);
  return pie_td_prove(pp, td, x, mu, out.y, out.advice, pp.t);
}

/// Verifies under the caller's expected watermark `mu`; a proof for another
/// scheme is rejected.
inline bool vdf_verify(const PublicParams& pp, const GroupElement& x, const Watermark& mu, const GroupElement& y,
                       const Proof& proof) {
  if (proof_scheme(proof) != pp.scheme) return false;
  if (const auto* w = std::get_if<WesolowskiProof>(&proof)) return wes_verify(pp, x, mu, y, *w, pp.t);
  return pie_verify(pp, x, mu, y, std::get<PietrzakProof>(proof), pp.t);
}

/// Serialized size of the group elements in a proof, each padded to the
/// modulus byte length.
inline std::size_t proof_bytes(const PublicParams& pp, const Proof& proof) {
  const std::size_t element = (bit_length(pp.n()) + 7) / 8;
  if (std::holds_alternative<WesolowskiProof>(proof)) return element;
  return element * std::get<PietrzakProof>(proof).midpoints.size();
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const HashSuiteId& h) { return json{{"name", h.name}, {"lambda", h.lambda}}; }

inline HashSuiteId hash_suite_from_json(const json& j) {
  return HashSuiteId{j.at("name").get<std::string>(), j.at("lambda").get<unsigned>()};
}

inline json to_json(const PublicParams& pp) {
  return json{{"scheme", scheme_name(pp.scheme)},
              {"lambda", pp.modulus.lambda},
              {"N", to_hex(pp.n())},
              {"T", pp.t},
              {"hash_suite", to_json(pp.hash_suite)}};
}

inline PublicParams public_params_from_json(const json& j) {
  PublicParams pp;
  pp.scheme = parse_scheme(j.at("scheme").get<std::string>());
  pp.modulus.lambda = j.at("lambda").get<unsigned>();
  pp.modulus.n = bigint_from_hex(j.at("N").get<std::string>());
  pp.t = j.at("T").get<std::uint64_t>();
  pp.hash_suite = hash_suite_from_json(j.at("hash_suite"));
  pp.validate();
  if (pp.n() <= 8 || mpz_even_p(pp.n().get_mpz_t())) throw Error(ErrorKind::malformed, "modulus must be odd and > 8");
  return pp;
}

inline json to_json(const Proof& proof) {
  if (const auto* w = std::get_if<WesolowskiProof>(&proof))
    return json{{"scheme", "wesolowski"}, {"pi", to_hex(w->pi)}, {"mu", w->mu.hex()}};
  const auto& p = std::get<PietrzakProof>(proof);
  json mids = json::array();
  for (const auto& m : p.midpoints) mids.push_back(to_hex(m));
  return json{{"scheme", "pietrzak"}, {"midpoints", std::move(mids)}, {"mu", p.mu.hex()}};
}

inline Proof proof_from_json(const json& j) {
  auto scheme = parse_scheme(j.at("scheme").get<std::string>());
  Watermark mu(from_hex(j.at("mu").get<std::string>()));
  if (scheme == Scheme::wesolowski) return WesolowskiProof{bigint_from_hex(j.at("pi").get<std::string>()), mu};
  PietrzakProof p{{}, mu};
  for (const auto& m : j.at("midpoints")) p.midpoints.push_back(bigint_from_hex(m.get<std::string>()));
  return p;
}

inline json to_json(const Trapdoor& td) {
  return json{{"p", to_hex(td.p)}, {"q", to_hex(td.q)}, {"phi_n", to_hex(td.phi_n)}};
}

inline Trapdoor trapdoor_from_json(const json& j) {
  return Trapdoor{bigint_from_hex(j.at("p").get<std::string>()), bigint_from_hex(j.at("q").get<std::string>()),
                  bigint_from_hex(j.at("phi_n").get<std::string>())};
}

}  // namespace randgener
