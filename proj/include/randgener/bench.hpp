#pragma once

#include "randgener/vdf.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

namespace randgener {

struct BenchConfig {
  unsigned lambda = 512;
  std::vector<std::uint64_t> ts;  // time bounds to sweep
  std::vector<Scheme> schemes = {Scheme::wesolowski, Scheme::pietrzak};
  std::uint64_t seed = 1;
  unsigned fast_repeats = 3;      // best-of-k for the sub-millisecond operations
};

struct BenchRow {
  Scheme scheme = Scheme::wesolowski;
  std::uint64_t t = 0;
  double eval_s = 0;
  double td_eval_s = 0;
  double prove_s = 0;
  double td_prove_s = 0;
  double verify_s = 0;
  std::size_t proof_bytes = 0;
  bool consistent = false;  // td output == eval output, proofs equal, proof verifies
};

namespace detail {

template <typename F>
double seconds(F&& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
double best_of(unsigned k, F&& f) {
  double best = seconds(f);
  for (unsigned i = 1; i < k; ++i) best = std::min(best, seconds(f));
  return best;
}

}  // namespace detail

/// One modulus per run; each (scheme, T) row times Eval, tdEval, Prove,
/// tdProve and Verify on the same sampled input.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  SeedSource rng(cfg.seed);
  auto [modulus, td] = rsw_setup(cfg.lambda, rng);
  std::vector<BenchRow> rows;
  const Watermark mu = Watermark::from_string("bench");
  for (auto scheme : cfg.schemes) {
    for (auto t : cfg.ts) {
      PublicParams pp{modulus, scheme == Scheme::pietrzak ? round_up_pow2(t) : t, {}, scheme};
      pp.validate();
      GroupElement x = vdf_sample(pp, rng);
      BenchRow row;
      row.scheme = scheme;
      row.t = pp.t;
      EvalOutput slow, fast;
      Proof proof, td_proof;
      bool ok = false;
      row.eval_s = detail::seconds([&] { slow = vdf_eval(pp, x); });
      row.td_eval_s = detail::best_of(cfg.fast_repeats, [&] { fast = vdf_td_eval(pp, td, x); });
      row.prove_s = detail::seconds([&] { proof = vdf_prove(pp, x, mu, slow); });
      row.td_prove_s = detail::best_of(cfg.fast_repeats, [&] { td_proof = vdf_td_prove(pp, td, x, mu, fast); });
      row.verify_s = detail::best_of(cfg.fast_repeats, [&] { ok = vdf_verify(pp, x, mu, slow.y, proof); });
      row.proof_bytes = proof_bytes(pp, proof);
      row.consistent = ok && slow.y == fast.y && to_json(proof) == to_json(td_proof);
      rows.push_back(row);
    }
  }
  return rows;
}

inline json to_json(const BenchRow& r) {
  return json{{"scheme", scheme_name(r.scheme)}, {"T", r.t},
              {"eval_time", r.eval_s},          {"td_eval_time", r.td_eval_s},
              {"prove_time", r.prove_s},        {"td_prove_time", r.td_prove_s},
              {"verify_time", r.verify_s},      {"proof_bytes", r.proof_bytes},
              {"consistent", r.consistent}};
}

}  // namespace randgener
