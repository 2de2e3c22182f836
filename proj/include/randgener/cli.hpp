#pragma once

#include "randgener/bench.hpp"
#include "randgener/fixtures.hpp"
#include "randgener/simulation.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

namespace randgener::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_reject = 1;
inline constexpr int exit_usage = 2;

namespace fs = std::filesystem;

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
}

inline void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline json identities_file(const std::vector<Participant>& ps, std::uint64_t seed) {
  json ids = json::array();
  for (const auto& p : ps) ids.push_back(to_json(p.identity));
  return json{{"identities", ids}, {"seed", seed}};
}

inline std::vector<ParticipantIdentity> identities_from_file(const json& j) {
  std::vector<ParticipantIdentity> out;
  for (const auto& id : j.at("identities")) out.push_back(identity_from_json(id));
  return out;
}

/// Loads identities.json and trapdoor_<i>.json from a setup directory.
inline std::vector<Participant> load_setup_dir(const fs::path& dir) {
  auto ids = identities_from_file(read_json_file(dir / "identities.json"));
  std::vector<Participant> out;
  for (auto& id : ids) {
    auto tj = read_json_file(dir / ("trapdoor_" + std::to_string(id.index) + ".json"));
    Trapdoor td = trapdoor_from_json(tj.at("trapdoor"));
    require_trapdoor(id.pp.modulus, td);
    out.push_back({std::move(id), std::move(td)});
  }
  return out;
}

struct Overrides {
  std::optional<std::size_t> n;
  std::optional<unsigned> lambda;
  std::optional<std::uint64_t> t;
  std::optional<std::string> scheme;
  std::optional<std::uint64_t> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> reward_unit;
  std::optional<std::int64_t> penalty_unit;

  void apply(SimConfig& c) const {
    if (n) c.n = *n;
    if (lambda) c.lambda = *lambda;
    if (t) c.t = *t;
    if (scheme) c.scheme = parse_scheme(*scheme);
    if (rounds) c.rounds = *rounds;
    if (seed) c.seed = *seed;
    if (reward_unit) c.policy.reward_unit = *reward_unit;
    if (penalty_unit) c.policy.penalty_unit = *penalty_unit;
  }
};

inline int cmd_setup(const Overrides& o, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  SimConfig c;
  o.apply(c);
  if (c.normalize()) err << "warning: T rounded up to " << c.t << " (pietrzak needs a power of two)\n";
  if (c.t < 2) throw Error(ErrorKind::invalid_argument, "T must be at least 2");
  auto ps = simulation_participants(c);
  fs::create_directories(out_dir);
  write_json_file(out_dir / "identities.json", identities_file(ps, c.seed));
  for (const auto& p : ps)
    write_json_file(out_dir / ("trapdoor_" + std::to_string(p.identity.index) + ".json"),
                    json{{"index", p.identity.index}, {"trapdoor", to_json(p.trapdoor)}});
  out << "wrote " << ps.size() + 1 << " files to " << out_dir.string() << "\n";
  return exit_ok;
}

inline int cmd_run(const Overrides& o, const std::string& config_path, const std::string& script_path,
                   const std::string& setup_dir, const fs::path& transcript_path, std::ostream& out,
                   std::ostream& err) {
  SimConfig c;
  if (!config_path.empty()) c = sim_config_from_json(read_json_file(config_path));
  std::optional<std::vector<Participant>> ps;
  if (!setup_dir.empty()) {
    ps = load_setup_dir(setup_dir);
    const auto& first = ps->front().identity.pp;
    c.n = ps->size();
    c.t = first.t;
    c.scheme = first.scheme;
    c.lambda = first.modulus.lambda;
    c.hash_suite = first.hash_suite;
  }
  o.apply(c);
  if (c.normalize()) err << "warning: T rounded up to " << c.t << " (pietrzak needs a power of two)\n";
  c.validate();
  BehaviorScript script;
  if (!script_path.empty()) script = behavior_script_from_json(read_json_file(script_path));

  std::ofstream file(transcript_path);
  if (!file) throw Error(ErrorKind::invalid_argument, "cannot write " + transcript_path.string());
  auto res = run_simulation(c, script, std::move(ps), &file);
  out << "transcript: " << transcript_path.string() << "\n" << ledger_summary(res);
  return exit_ok;
}

inline int cmd_verify(const fs::path& transcript_path, const std::string& identities_path, std::ostream& out) {
  std::ifstream in(transcript_path);
  if (!in) {
    out << "reject: cannot open " << transcript_path.string() << "\n";
    return exit_reject;
  }
  std::optional<std::vector<ParticipantIdentity>> ids;
  if (!identities_path.empty()) ids = identities_from_file(read_json_file(identities_path));
  auto res = replay_verify(in, ids);
  if (!res.ok) {
    out << "reject at line " << res.line << ": " << res.reason << "\n";
    return exit_reject;
  }
  out << "accept: " << res.records << " records\n";
  return exit_ok;
}

inline int cmd_bench(unsigned lambda, unsigned log2_min, unsigned log2_max, const std::string& scheme,
                     std::uint64_t seed, bool as_json, std::ostream& out) {
  if (log2_min > log2_max || log2_max > 40) throw Error(ErrorKind::invalid_argument, "bad T range");
  BenchConfig cfg;
  cfg.lambda = lambda;
  cfg.seed = seed;
  for (unsigned k = log2_min; k <= log2_max; ++k) cfg.ts.push_back(std::uint64_t{1} << k);
  if (scheme != "both") cfg.schemes = {parse_scheme(scheme)};
  auto rows = run_bench(cfg);
  if (as_json) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    out << arr.dump(2) << "\n";
  } else {
    out << std::left << std::setw(11) << "scheme" << std::setw(9) << "T" << std::setw(12) << "eval_s" << std::setw(12)
        << "td_eval_s" << std::setw(12) << "prove_s" << std::setw(12) << "verify_s" << std::setw(12) << "proof_bytes"
        << "\n";
    for (const auto& r : rows)
      out << std::left << std::setw(11) << scheme_name(r.scheme) << std::setw(9) << r.t << std::setw(12) << r.eval_s
          << std::setw(12) << r.td_eval_s << std::setw(12) << r.prove_s << std::setw(12) << r.verify_s
          << std::setw(12) << r.proof_bytes << (r.consistent ? "" : "  INCONSISTENT") << "\n";
  }
  for (const auto& r : rows)
    if (!r.consistent) return exit_reject;
  return exit_ok;
}

inline int cmd_fixtures(const fs::path& out_path, std::ostream& out) {
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_json_file(out_path, golden_hash_fixtures());
  out << "wrote " << out_path.string() << "\n";
  return exit_ok;
}

/// Entry point shared by the executable and the tests.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"RandGener distributed randomness beacon"};
  app.require_subcommand(1);

  Overrides o;
  auto add_params = [&](CLI::App* sub, bool with_run_fields) {
    sub->add_option("--n", o.n, "participant count");
    sub->add_option("--lambda", o.lambda, "factor bit length");
    sub->add_option("--T", o.t, "sequential squarings");
    sub->add_option("--scheme", o.scheme, "wesolowski | pietrzak")->check(CLI::IsMember({"wesolowski", "pietrzak"}));
    sub->add_option("--seed", o.seed, "root seed");
    if (with_run_fields) {
      sub->add_option("--rounds", o.rounds, "rounds to run");
      sub->add_option("--reward_unit,--reward-unit", o.reward_unit, "reward per honest round");
      sub->add_option("--penalty_unit,--penalty-unit", o.penalty_unit, "penalty per faulty round");
    }
  };

  std::string out_dir = ".";
  auto* setup = app.add_subcommand("setup", "generate identities and trapdoor files");
  add_params(setup, false);
  setup->add_option("--out", out_dir, "output directory");

  std::string config_path, script_path, setup_dir, transcript_path = "transcript.jsonl";
  auto* run_cmd = app.add_subcommand("run", "run the beacon simulation");
  add_params(run_cmd, true);
  run_cmd->add_option("--config", config_path, "config JSON");
  run_cmd->add_option("--script", script_path, "behavior script JSON");
  run_cmd->add_option("--setup", setup_dir, "directory written by `setup`");
  run_cmd->add_option("--out", transcript_path, "transcript output");

  std::string verify_path, identities_path;
  auto* verify = app.add_subcommand("verify", "re-verify a transcript");
  verify->add_option("transcript", verify_path, "transcript file")->required();
  verify->add_option("--identities", identities_path, "identities.json to cross-check");

  unsigned bench_lambda = 512, log2_min = 14, log2_max = 18;
  std::uint64_t bench_seed = 1;
  std::string bench_scheme = "both";
  bool bench_json = false;
  auto* bench = app.add_subcommand("bench", "time Eval/tdEval/Prove/Verify over a T sweep");
  bench->add_option("--lambda", bench_lambda, "factor bit length");
  bench->add_option("--log2-min", log2_min, "smallest log2(T)");
  bench->add_option("--log2-max", log2_max, "largest log2(T)");
  bench->add_option("--scheme", bench_scheme)->check(CLI::IsMember({"wesolowski", "pietrzak", "both"}));
  bench->add_option("--seed", bench_seed);
  bench->add_flag("--json", bench_json, "emit JSON rows");

  std::string fixtures_out = "tests/fixtures/hash_golden.json";
  auto* fixtures = app.add_subcommand("fixtures", "regenerate golden hash fixtures");
  fixtures->add_option("--out", fixtures_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return exit_usage;
  }

  try {
    if (*setup) return cmd_setup(o, out_dir, out, err);
    if (*run_cmd) return cmd_run(o, config_path, script_path, setup_dir, transcript_path, out, err);
    if (*verify) return cmd_verify(verify_path, identities_path, out);
    if (*bench) return cmd_bench(bench_lambda, log2_min, log2_max, bench_scheme, bench_seed, bench_json, out);
    if (*fixtures) return cmd_fixtures(fixtures_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_reject;
  }
  return exit_usage;
}

}  // namespace randgener::cli
