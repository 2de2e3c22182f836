#pragma once

#include "randgener/transcript_store.hpp"

#include <map>
#include <ostream>
#include <sstream>

namespace randgener {

struct SimConfig {
  std::size_t n = 3;
  unsigned lambda = 32;
  std::uint64_t t = 256;
  Scheme scheme = Scheme::wesolowski;
  HashSuiteId hash_suite;
  Digest32 r0{};
  SettlementPolicy policy;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 3;
  bool eject_faulty = false;
  RoundTiming timing;

  /// Applies the power-of-two policy for pietrzak; returns true if T changed.
  bool normalize() {
    if (scheme != Scheme::pietrzak) return false;
    auto rounded = round_up_pow2(t);
    bool changed = rounded != t;
    t = rounded;
    return changed;
  }

  void validate() const {
    if (n < 2) throw Error(ErrorKind::invalid_argument, "n must be at least 2");
    if (rounds < 1) throw Error(ErrorKind::invalid_argument, "rounds must be at least 1");
    if (lambda < 16) throw Error(ErrorKind::invalid_argument, "lambda must be at least 16");
    if (t < 2) throw Error(ErrorKind::invalid_argument, "T must be at least 2");
    timing.validate();
  }
};

inline json to_json(const SimConfig& c) {
  return json{{"n", c.n},
              {"lambda", c.lambda},
              {"T", c.t},
              {"scheme", scheme_name(c.scheme)},
              {"hash_suite", to_json(c.hash_suite)},
              {"R_0", to_hex(c.r0)},
              {"reward_unit", c.policy.reward_unit},
              {"penalty_unit", c.policy.penalty_unit},
              {"recovery_credit", c.policy.recovery_credit},
              {"seed", c.seed},
              {"rounds", c.rounds},
              {"eject_faulty", c.eject_faulty},
              {"T_0", c.timing.commit_deadline},
              {"T_1", c.timing.reveal_deadline},
              {"delay", c.timing.delay},
              {"squarings_per_tick", c.timing.squarings_per_tick}};
}

/// Every field is optional; missing ones keep their defaults. Unknown keys
/// are rejected.
inline SimConfig sim_config_from_json(const json& j, SimConfig c = {}) {
  static const std::set<std::string> known = {"n",       "lambda",       "T",           "scheme",       "hash_suite",
                                              "R_0",     "reward_unit",  "penalty_unit", "recovery_credit", "seed",
                                              "rounds",  "eject_faulty", "T_0",         "T_1",          "delay",
                                              "squarings_per_tick"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw Error(ErrorKind::invalid_argument, "unknown config key: " + k);
  if (j.contains("n")) c.n = j["n"].get<std::size_t>();
  if (j.contains("lambda")) c.lambda = j["lambda"].get<unsigned>();
  if (j.contains("T")) c.t = j["T"].get<std::uint64_t>();
  if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"].get<std::string>());
  if (j.contains("hash_suite")) c.hash_suite = hash_suite_from_json(j["hash_suite"]);
  if (j.contains("R_0")) c.r0 = digest_from_hex(j["R_0"].get<std::string>());
  if (j.contains("reward_unit")) c.policy.reward_unit = j["reward_unit"].get<std::int64_t>();
  if (j.contains("penalty_unit")) c.policy.penalty_unit = j["penalty_unit"].get<std::int64_t>();
  if (j.contains("recovery_credit")) c.policy.recovery_credit = j["recovery_credit"].get<std::int64_t>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("rounds")) c.rounds = j["rounds"].get<std::uint64_t>();
  if (j.contains("eject_faulty")) c.eject_faulty = j["eject_faulty"].get<bool>();
  if (j.contains("T_0")) c.timing.commit_deadline = j["T_0"].get<Tick>();
  if (j.contains("T_1")) c.timing.reveal_deadline = j["T_1"].get<Tick>();
  if (j.contains("delay")) c.timing.delay = j["delay"].get<Tick>();
  if (j.contains("squarings_per_tick")) c.timing.squarings_per_tick = j["squarings_per_tick"].get<std::uint64_t>();
  return c;
}

/// Per-round behavior assignments; unlisted participants are honest.
struct BehaviorScript {
  std::map<std::uint64_t, std::map<std::size_t, Behavior>> rounds;

  std::map<std::size_t, Behavior> for_round(std::uint64_t r) const {
    auto it = rounds.find(r);
    return it == rounds.end() ? std::map<std::size_t, Behavior>{} : it->second;
  }

  BehaviorScript& set(std::uint64_t r, std::size_t i, Behavior b) {
    rounds[r][i] = std::move(b);
    return *this;
  }
};

/// {"rounds": {"2": {"1": "withhold_reveal"}}}; the "rounds" wrapper is optional.
inline BehaviorScript behavior_script_from_json(const json& j) {
  const json& rounds = j.contains("rounds") ? j.at("rounds") : j;
  BehaviorScript s;
  for (const auto& [rk, per] : rounds.items())
    for (const auto& [ik, b] : per.items()) s.set(std::stoull(rk), std::stoul(ik), behavior_from_json(b));
  return s;
}

inline json to_json(const BehaviorScript& s) {
  json rounds = json::object();
  for (const auto& [r, per] : s.rounds)
    for (const auto& [i, b] : per) rounds[std::to_string(r)][std::to_string(i)] = to_json(b);
  return json{{"rounds", rounds}};
}

struct SimulationResult {
  InstanceHeader header;
  std::vector<RoundOutcome> rounds;
  Ledger ledger;
};

inline InstanceHeader make_header(const SimConfig& c, std::vector<ParticipantIdentity> ids) {
  InstanceHeader h;
  h.n = c.n;
  h.lambda = c.lambda;
  h.t = c.t;
  h.scheme = c.scheme;
  h.hash_suite = c.hash_suite;
  h.r0 = c.r0;
  h.policy = c.policy;
  h.seed = c.seed;
  h.eject_faulty = c.eject_faulty;
  h.identities = std::move(ids);
  return h;
}

/// Generates the participant set from the config seed.
inline std::vector<Participant> simulation_participants(const SimConfig& c, const RswSetupOptions& opts = {}) {
  return drb_setup(c.lambda, c.t, c.scheme, c.n, SeedSource(c.seed).derive("instance"), opts, c.hash_suite);
}

/// Runs `config.rounds` rounds under the script. Deterministic given the
/// config, script and participants; the transcript, when requested, is
/// written line by line.
inline SimulationResult run_simulation(SimConfig config, const BehaviorScript& script,
                                       std::optional<std::vector<Participant>> participants = std::nullopt,
                                       std::ostream* transcript = nullptr) {
  config.normalize();
  config.validate();
  std::vector<Participant> ps = participants ? std::move(*participants) : simulation_participants(config);
  if (ps.size() != config.n) throw Error(ErrorKind::invalid_argument, "participant count does not match n");
  for (const auto& p : ps)
    if (p.identity.pp.t != config.t || p.identity.pp.scheme != config.scheme)
      throw Error(ErrorKind::invalid_argument, "participant parameters do not match config");
  auto ids = identities_of(ps);
  auto verdict = drb_verify_setup(ids, config.t, config.scheme, config.hash_suite);
  if (!verdict.ok()) throw Error(ErrorKind::invalid_argument, "setup verification failed: " + verdict.reasons.front());

  SimulationResult result;
  result.header = make_header(config, ids);
  std::optional<TranscriptWriter> writer;
  if (transcript) writer.emplace(*transcript, result.header);

  BeaconInstance instance(std::move(ps), config.r0, config.policy, config.timing,
                          SeedSource(config.seed).derive("rounds"), config.eject_faulty);
  for (std::uint64_t r = 1; r <= config.rounds; ++r) {
    auto outcome = instance.run_round(r, script.for_round(r));
    if (writer) writer->append(outcome.record);
    result.rounds.push_back(std::move(outcome));
  }
  result.ledger = instance.ledger();
  return result;
}

inline std::string ledger_summary(const SimulationResult& res) {
  std::ostringstream os;
  std::size_t pessimistic = 0;
  for (const auto& o : res.rounds) pessimistic += o.record.path == BeaconPath::pessimistic;
  os << "rounds: " << res.rounds.size() << " (optimistic " << res.rounds.size() - pessimistic << ", pessimistic "
     << pessimistic << ")\n";
  if (!res.rounds.empty()) os << "final beacon: " << to_hex(res.rounds.back().record.beacon) << "\n";
  os << "participant  balance  faulty_rounds  recoveries\n";
  for (const auto& [i, bal] : res.ledger.balances) {
    std::size_t faulty = 0, recoveries = 0;
    for (const auto& o : res.rounds) {
      faulty += std::count(o.record.faulty.begin(), o.record.faulty.end(), i);
      for (const auto& e : o.record.entries) recoveries += e.recovered_by && *e.recovered_by == i;
    }
    os << "P" << i << "  " << bal << "  " << faulty << "  " << recoveries << "\n";
  }
  for (const auto& o : res.rounds)
    if (o.report.coalition) {
      const auto& c = *o.report.coalition;
      std::uint64_t honest_squarings = 0;
      for (const auto& rec : o.report.recoveries) honest_squarings += rec.eval_ops.squarings;
      os << "round " << o.record.r << " coalition {";
      for (std::size_t k = 0; k < c.members.size(); ++k) os << (k ? "," : "") << "P" << c.members[k];
      os << "}: private beacon " << (c.private_beacon ? "learned at tick " + std::to_string(c.learned_at) : "not learned")
         << " with " << c.ops.squarings << " squarings / " << c.ops.multiplications
         << " trapdoor multiplications; public recovery took " << honest_squarings << " squarings, finished at tick "
         << o.report.finished << "\n";
    }
  return os.str();
}

}  // namespace randgener
