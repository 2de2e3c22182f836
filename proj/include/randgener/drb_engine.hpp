#pragma once

#include "randgener/sim_net.hpp"
#include "randgener/vdf.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace randgener {

// ===========================================================================
// Participants and setup

/// Stand-in for the safe-prime zero-knowledge proof: a claimed factor bit
/// length and a hash of N. Verification only checks well-formedness.
struct SetupAttestation {
  static constexpr std::string_view kind = "stub-attestation-v1";

  unsigned factor_bits = 0;
  Digest32 modulus_hash{};

  static SetupAttestation for_modulus(const RswModulus& m) { return {m.lambda, sha256(serialize(m.n))}; }

  Bytes encode() const {
    Bytes b;
    put_prefixed(b, kind);
    put_u32(b, factor_bits);
    b.insert(b.end(), modulus_hash.begin(), modulus_hash.end());
    return b;
  }

  static std::optional<SetupAttestation> decode(std::span<const std::uint8_t> blob) {
    Bytes expected_prefix;
    put_prefixed(expected_prefix, kind);
    if (blob.size() != expected_prefix.size() + 4 + 32) return std::nullopt;
    if (!std::equal(expected_prefix.begin(), expected_prefix.end(), blob.begin())) return std::nullopt;
    auto rest = blob.subspan(expected_prefix.size());
    SetupAttestation a;
    a.factor_bits = (unsigned{rest[0]} << 24) | (unsigned{rest[1]} << 16) | (unsigned{rest[2]} << 8) | rest[3];
    std::copy(rest.begin() + 4, rest.end(), a.modulus_hash.begin());
    return a;
  }
};

struct ParticipantIdentity {
  std::size_t index = 0;
  Watermark mu;
  PublicParams pp;
  Bytes setup_attestation;
};

/// Identity plus the trapdoor only its owner holds.
struct Participant {
  ParticipantIdentity identity;
  Trapdoor trapdoor;
};

inline Watermark participant_watermark(std::size_t index) {
  return Watermark::from_string("participant-" + std::to_string(index));
}

/// Watermark used when nobody outside the faulty set is available to recover.
inline const Watermark& public_recoverer_watermark() {
  static const Watermark mu = Watermark::from_string("public-recoverer");
  return mu;
}

inline constexpr std::size_t public_recoverer = std::numeric_limits<std::size_t>::max();

/// DRB.Setup: n independent moduli, each with a stub attestation. For the
/// pietrzak scheme T is rounded up to a power of two.
inline std::vector<Participant> drb_setup(unsigned lambda, std::uint64_t t, Scheme scheme, std::size_t n,
                                          const SeedSource& seed, const RswSetupOptions& opts = {},
                                          const HashSuiteId& suite = {}) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "at least two participants required");
  if (scheme == Scheme::pietrzak) t = round_up_pow2(t);
  std::vector<Participant> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SeedSource rng = seed.derive("setup", i);
    auto [pp, td] = vdf_setup(lambda, t, scheme, rng, opts, suite);
    Bytes att = SetupAttestation::for_modulus(pp.modulus).encode();
    out.push_back({{i, participant_watermark(i), std::move(pp), std::move(att)}, std::move(td)});
  }
  return out;
}

/// Fixture setup from explicit safe-prime pairs. lambda is recorded as
/// ceil(bits(N)/2) so the bit-length check in drb_verify_setup holds.
inline std::vector<Participant> drb_setup_fixture(const std::vector<std::pair<BigInt, BigInt>>& primes,
                                                  std::uint64_t t, Scheme scheme, const HashSuiteId& suite = {}) {
  if (primes.size() < 2) throw Error(ErrorKind::invalid_argument, "at least two participants required");
  if (scheme == Scheme::pietrzak) t = round_up_pow2(t);
  std::vector<Participant> out;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto& [p, q] = primes[i];
    auto lambda = static_cast<unsigned>((bit_length(p * q) + 1) / 2);
    auto [pp, td] = vdf_setup_fixture(lambda, p, q, t, scheme, suite);
    Bytes att = SetupAttestation::for_modulus(pp.modulus).encode();
    out.push_back({{i, participant_watermark(i), std::move(pp), std::move(att)}, std::move(td)});
  }
  return out;
}

inline std::vector<ParticipantIdentity> identities_of(const std::vector<Participant>& ps) {
  std::vector<ParticipantIdentity> out;
  for (const auto& p : ps) out.push_back(p.identity);
  return out;
}

struct SetupVerdict {
  std::vector<std::size_t> rejected;
  std::vector<std::string> reasons;

  bool ok() const { return rejected.empty(); }
};

/// DRB.VerifySetup with the stub attestation: N odd with 2*lambda-1 or
/// 2*lambda bits, attestation consistent with N, shared T/scheme/hash suite,
/// unique indices and watermarks.
inline SetupVerdict drb_verify_setup(std::span<const ParticipantIdentity> ids, std::uint64_t t, Scheme scheme,
                                     const HashSuiteId& suite = {}) {
  SetupVerdict v;
  std::set<Bytes> seen_mu;
  std::set<std::size_t> seen_index;
  for (const auto& id : ids) {
    std::string why;
    const auto& m = id.pp.modulus;
    const auto bits = bit_length(m.n);
    if (m.n <= 8 || mpz_even_p(m.n.get_mpz_t()))
      why = "modulus must be odd and > 8";
    else if (bits + 1 < 2 * std::size_t{m.lambda} || bits > 2 * std::size_t{m.lambda})
      why = "modulus bit length inconsistent with lambda";
    else if (id.pp.t != t)
      why = "time bound differs from instance";
    else if (id.pp.scheme != scheme)
      why = "proof scheme differs from instance";
    else if (id.pp.hash_suite != suite)
      why = "hash suite differs from instance";
    else if (!seen_mu.insert(id.mu.bytes()).second)
      why = "duplicate watermark";
    else if (!seen_index.insert(id.index).second)
      why = "duplicate index";
    else {
      auto att = SetupAttestation::decode(id.setup_attestation);
      if (!att)
        why = "malformed attestation";
      else if (att->factor_bits != m.lambda || att->modulus_hash != sha256(serialize(m.n)))
        why = "attestation does not match modulus";
    }
    if (!why.empty()) {
      v.rejected.push_back(id.index);
      v.reasons.push_back(std::move(why));
    }
  }
  return v;
}

// ===========================================================================
// Rounds

enum class Phase { commit, reveal, finalize, recover, done };
enum class BeaconPath { optimistic, pessimistic };

inline std::string_view path_name(BeaconPath p) { return p == BeaconPath::optimistic ? "optimistic" : "pessimistic"; }

struct Reveal {
  GroupElement y;
  Proof proof;
};

struct Recovery {
  std::size_t participant = 0;
  std::size_t recoverer = public_recoverer;
  GroupElement y;
  Proof proof;
  OpCounter eval_ops;   // the slow Eval alone
  OpCounter prove_ops;  // proof generation without the trapdoor
};

struct RoundState {
  std::uint64_t r = 1;
  Phase phase = Phase::commit;
  Digest32 prev_beacon{};
  std::vector<std::size_t> roster;                 // participants expected this round
  std::map<std::size_t, GroupElement> inputs;      // x_{r,i} published by the commit deadline
  std::map<std::size_t, Reveal> reveals;           // published by the reveal deadline
  std::set<std::size_t> verified;                  // reveals that passed Verify
  std::set<std::size_t> faulty;                    // P~
  std::map<std::size_t, Recovery> recovered;
  std::optional<BigInt> aggregate;
  std::optional<Digest32> beacon;

  BeaconPath path() const { return faulty.empty() ? BeaconPath::optimistic : BeaconPath::pessimistic; }
};

inline RoundState open_round(std::uint64_t r, const Digest32& prev_beacon, std::vector<std::size_t> roster) {
  RoundState s;
  s.r = r;
  s.prev_beacon = prev_beacon;
  s.roster = std::move(roster);
  std::sort(s.roster.begin(), s.roster.end());
  return s;
}

/// x_r = H_randToinput(R_{r-1}) in the participant's group.
inline GroupElement round_base_input(const Digest32& prev_beacon, const ParticipantIdentity& id) {
  return h_rand_to_input(prev_beacon, id.pp.modulus);
}

/// x_{r,i}: H(nonce || x_r) mapped into Z*_{N_i}. The nonce stays private.
inline GroupElement derive_round_inputs(std::uint64_t /*r*/, const Digest32& prev_beacon,
                                        const ParticipantIdentity& id, std::span<const std::uint8_t> nonce) {
  GroupElement x_r = round_base_input(prev_beacon, id);
  return commit_to_group(h_commit(nonce, x_r), id.pp.modulus);
}

/// Records a commitment; rejected once the commit phase is over.
inline void accept_commit(RoundState& s, std::size_t participant, GroupElement x) {
  if (s.phase != Phase::commit) throw Error(ErrorKind::late_commit, "commit phase closed");
  s.inputs.insert_or_assign(participant, std::move(x));
}

/// Trapdoor evaluation and watermarked trapdoor proof.
inline Reveal reveal(const Participant& self, const GroupElement& x) {
  const auto& pp = self.identity.pp;
  EvalOutput out = vdf_td_eval(pp, self.trapdoor, x);
  Proof proof = vdf_td_prove(pp, self.trapdoor, x, self.identity.mu, out);
  return {std::move(out.y), std::move(proof)};
}

inline const ParticipantIdentity& identity_at(std::span<const ParticipantIdentity> ids, std::size_t index) {
  for (const auto& id : ids)
    if (id.index == index) return id;
  throw Error(ErrorKind::invalid_argument, "unknown participant " + std::to_string(index));
}

/// Integer product of canonical residues, in participant order.
inline BigInt aggregate_outputs(const std::map<std::size_t, GroupElement>& ys) {
  BigInt acc = 1;
  for (const auto& [i, y] : ys) acc *= y.value();
  return acc;
}

namespace detail {

inline std::map<std::size_t, GroupElement> collected_outputs(const RoundState& s) {
  std::map<std::size_t, GroupElement> ys;
  for (auto i : s.verified) ys.emplace(i, s.reveals.at(i).y);
  for (const auto& [i, rec] : s.recovered) ys.emplace(i, rec.y);
  return ys;
}

inline void emit_beacon(RoundState& s) {
  s.aggregate = aggregate_outputs(collected_outputs(s));
  s.beacon = h_input_to_rand(*s.aggregate);
  s.phase = Phase::done;
}

}  // namespace detail

/// Verifies every reveal under its owner's watermark. Non-committers,
/// non-revealers and failed proofs enter P~. With P~ empty the beacon is
/// emitted directly; otherwise the round moves to recovery.
inline RoundState finalize(RoundState s, std::span<const ParticipantIdentity> ids) {
  s.phase = Phase::finalize;
  s.verified.clear();
  s.faulty.clear();
  for (auto i : s.roster) {
    const auto& id = identity_at(ids, i);
    auto in = s.inputs.find(i);
    auto rv = s.reveals.find(i);
    bool ok = in != s.inputs.end() && rv != s.reveals.end() &&
              vdf_verify(id.pp, in->second, id.mu, rv->second.y, rv->second.proof);
    (ok ? s.verified : s.faulty).insert(i);
  }
  if (s.faulty.empty())
    detail::emit_beacon(s);
  else
    s.phase = Phase::recover;
  return s;
}

/// Participants in P~ whose input was published and can be force-opened.
inline std::vector<std::size_t> recoverable(const RoundState& s) {
  std::vector<std::size_t> out;
  for (auto j : s.faulty)
    if (s.inputs.count(j)) out.push_back(j);
  return out;
}

/// Lowest-index participant outside P~, or the public recoverer.
inline std::size_t choose_recoverer(const RoundState& s) {
  for (auto i : s.roster)
    if (!s.faulty.count(i)) return i;
  return public_recoverer;
}

inline const Watermark& recoverer_watermark(std::span<const ParticipantIdentity> ids, std::size_t recoverer) {
  return recoverer == public_recoverer ? public_recoverer_watermark() : identity_at(ids, recoverer).mu;
}

/// Slow path for one withheld input: Eval without the trapdoor, proved under
/// the recoverer's watermark.
inline Recovery recover_one(const ParticipantIdentity& target, const GroupElement& x, std::size_t recoverer,
                            const Watermark& recoverer_mu, std::stop_token stop = {}) {
  Recovery rec;
  rec.participant = target.index;
  rec.recoverer = recoverer;
  EvalOutput out;
  {
    CountScope scope(rec.eval_ops);
    out = vdf_eval(target.pp, x, stop);
  }
  {
    CountScope scope(rec.prove_ops);
    rec.proof = vdf_prove(target.pp, x, recoverer_mu, out, stop);
  }
  rec.y = std::move(out.y);
  return rec;
}

inline RoundState complete_recovery(RoundState s, std::vector<Recovery> recoveries) {
  if (s.phase != Phase::recover) throw Error(ErrorKind::invalid_argument, "round is not in recovery");
  for (auto& rec : recoveries) {
    if (!s.faulty.count(rec.participant)) throw Error(ErrorKind::invalid_argument, "recovery for a non-faulty participant");
    s.recovered.try_emplace(rec.participant, std::move(rec));  // first recovery wins
  }
  detail::emit_beacon(s);
  return s;
}

/// Recover: force-open every published-but-unrevealed input, then emit
/// y_r = prod(verified y) * prod(recovered y).
inline RoundState recover(RoundState s, std::span<const ParticipantIdentity> ids, std::size_t recoverer,
                          std::stop_token stop = {}) {
  if (s.phase != Phase::recover) throw Error(ErrorKind::invalid_argument, "round is not in recovery");
  const Watermark& mu = recoverer_watermark(ids, recoverer);
  std::vector<Recovery> recs;
  for (auto j : recoverable(s)) recs.push_back(recover_one(identity_at(ids, j), s.inputs.at(j), recoverer, mu, stop));
  return complete_recovery(std::move(s), std::move(recs));
}

// ===========================================================================
// Ledger

struct SettlementPolicy {
  std::int64_t reward_unit = 2;
  std::int64_t penalty_unit = 5;
  std::int64_t recovery_credit = 2;  // per recovered evaluation, to the recoverer
};

struct Ledger {
  std::map<std::size_t, std::int64_t> balances;

  std::int64_t balance(std::size_t i) const {
    auto it = balances.find(i);
    return it == balances.end() ? 0 : it->second;
  }
  friend bool operator==(const Ledger&, const Ledger&) = default;
};

inline Ledger settle(const RoundState& s, Ledger ledger, const SettlementPolicy& policy) {
  if (s.phase != Phase::done) throw Error(ErrorKind::invalid_argument, "round not finished");
  for (auto i : s.roster) {
    auto& b = ledger.balances[i];
    b += s.faulty.count(i) ? -policy.penalty_unit : policy.reward_unit;
  }
  for (const auto& [j, rec] : s.recovered)
    if (rec.recoverer != public_recoverer) ledger.balances[rec.recoverer] += policy.recovery_credit;
  return ledger;
}

// ===========================================================================
// Beacon records

struct RecordEntry {
  std::size_t participant = 0;
  GroupElement x;
  GroupElement y;
  Proof proof;
  std::optional<std::size_t> recovered_by;  // set on the pessimistic path; public_recoverer allowed
};

struct BeaconRecord {
  std::uint64_t r = 0;
  Digest32 prev_beacon{};
  Digest32 beacon{};
  std::vector<std::size_t> contributors;
  std::vector<std::size_t> faulty;
  std::vector<RecordEntry> entries;
  BeaconPath path = BeaconPath::optimistic;
  Ledger ledger;  // balances after settlement
};

inline BeaconRecord make_record(const RoundState& s, const Ledger& ledger) {
  if (s.phase != Phase::done || !s.beacon) throw Error(ErrorKind::invalid_argument, "round not finished");
  BeaconRecord rec;
  rec.r = s.r;
  rec.prev_beacon = s.prev_beacon;
  rec.beacon = *s.beacon;
  rec.contributors.assign(s.verified.begin(), s.verified.end());
  rec.faulty.assign(s.faulty.begin(), s.faulty.end());
  rec.path = s.path();
  for (auto i : s.verified) {
    const auto& rv = s.reveals.at(i);
    rec.entries.push_back({i, s.inputs.at(i), rv.y, rv.proof, std::nullopt});
  }
  for (const auto& [j, r] : s.recovered) rec.entries.push_back({j, s.inputs.at(j), r.y, r.proof, r.recoverer});
  std::sort(rec.entries.begin(), rec.entries.end(),
            [](const RecordEntry& a, const RecordEntry& b) { return a.participant < b.participant; });
  rec.ledger = ledger;
  return rec;
}

struct RecordCheck {
  bool ok = true;
  std::string reason;

  static RecordCheck fail(std::string why) { return {false, std::move(why)}; }
};

/// Independent re-verification from public data only: every proof under the
/// expected watermark, set consistency, the aggregate and the beacon digest.
/// When `prev_ledger` and `policy` are given the balance deltas are checked too.
inline RecordCheck verify_beacon_record(std::span<const ParticipantIdentity> ids, const BeaconRecord& rec,
                                        const Digest32& expected_prev, const Ledger* prev_ledger = nullptr,
                                        const SettlementPolicy* policy = nullptr) {
  if (rec.prev_beacon != expected_prev) return RecordCheck::fail("previous beacon does not chain");
  std::set<std::size_t> contributors(rec.contributors.begin(), rec.contributors.end());
  std::set<std::size_t> faulty(rec.faulty.begin(), rec.faulty.end());
  if (contributors.size() != rec.contributors.size() || faulty.size() != rec.faulty.size())
    return RecordCheck::fail("duplicate participant in sets");
  for (auto i : contributors)
    if (faulty.count(i)) return RecordCheck::fail("participant both contributor and faulty");
  if ((rec.path == BeaconPath::optimistic) != faulty.empty()) return RecordCheck::fail("path tag inconsistent");

  std::map<std::size_t, GroupElement> ys;
  std::set<std::size_t> revealed;
  for (const auto& e : rec.entries) {
    const ParticipantIdentity* id = nullptr;
    for (const auto& cand : ids)
      if (cand.index == e.participant) id = &cand;
    if (!id) return RecordCheck::fail("entry for unknown participant " + std::to_string(e.participant));
    if (e.x.modulus() != id->pp.n() || e.y.modulus() != id->pp.n())
      return RecordCheck::fail("entry elements outside participant group");
    const Watermark* mu = &id->mu;
    if (e.recovered_by) {
      if (!faulty.count(e.participant)) return RecordCheck::fail("recovered entry for non-faulty participant");
      if (*e.recovered_by == public_recoverer)
        mu = &public_recoverer_watermark();
      else {
        bool found = false;
        for (const auto& cand : ids)
          if (cand.index == *e.recovered_by) {
            mu = &cand.mu;
            found = true;
          }
        if (!found) return RecordCheck::fail("unknown recoverer");
      }
    } else {
      if (!contributors.count(e.participant)) return RecordCheck::fail("revealed entry not listed as contributor");
      revealed.insert(e.participant);
    }
    if (!vdf_verify(id->pp, e.x, *mu, e.y, e.proof))
      return RecordCheck::fail("proof rejected for participant " + std::to_string(e.participant));
    if (!ys.emplace(e.participant, e.y).second) return RecordCheck::fail("duplicate entry");
  }
  if (revealed != contributors) return RecordCheck::fail("contributor without a verified entry");
  if (h_input_to_rand(aggregate_outputs(ys)) != rec.beacon) return RecordCheck::fail("beacon digest mismatch");

  if (prev_ledger && policy) {
    Ledger expect = *prev_ledger;
    for (auto i : contributors) expect.balances[i] += policy->reward_unit;
    for (auto i : faulty) expect.balances[i] -= policy->penalty_unit;
    for (const auto& e : rec.entries)
      if (e.recovered_by && *e.recovered_by != public_recoverer) expect.balances[*e.recovered_by] += policy->recovery_credit;
    if (expect != rec.ledger) return RecordCheck::fail("ledger balances inconsistent with settlement");
  }
  return {};
}

// ===========================================================================
// Event-driven rounds

/// Logical deadlines relative to a round's start tick.
struct RoundTiming {
  Tick commit_deadline = 2;  // T_0
  Tick reveal_deadline = 4;  // T_1
  Tick delay = 1;
  Tick reveal_cost = 1;      // trapdoor evaluation + proof
  std::uint64_t squarings_per_tick = 1024;

  void validate() const {
    if (delay == 0) throw Error(ErrorKind::invalid_argument, "delay must be at least one tick");
    if (commit_deadline < delay) throw Error(ErrorKind::invalid_argument, "commit deadline shorter than delay");
    if (reveal_deadline <= commit_deadline) throw Error(ErrorKind::invalid_argument, "T_0 must precede T_1");
    if (reveal_deadline < commit_deadline + reveal_cost + delay)
      throw Error(ErrorKind::invalid_argument, "reveal deadline leaves no time to reveal");
    if (squarings_per_tick == 0) throw Error(ErrorKind::invalid_argument, "squarings_per_tick must be positive");
  }
};

struct CommitMsg {
  std::uint64_t r;
  GroupElement x;
};
struct RevealMsg {
  std::uint64_t r;
  Reveal reveal;
};
using Message = std::variant<CommitMsg, RevealMsg>;

/// What a coalition of withholders learned privately.
struct CoalitionView {
  std::vector<std::size_t> members;
  std::optional<Digest32> private_beacon;  // set when every non-coalition input was revealed
  Tick learned_at = 0;
  OpCounter ops;                           // trapdoor work only
};

struct RoundReport {
  std::uint64_t r = 0;
  Tick started = 0;
  Tick finished = 0;
  std::map<std::size_t, OpCounter> reveal_ops;  // trapdoor Eval + Prove per revealer
  std::vector<Recovery> recoveries;
  std::optional<CoalitionView> coalition;
};

struct RoundOutcome {
  BeaconRecord record;
  RoundState state;
  RoundReport report;
};

/// Flips the low bit of the first proof element. Used by the invalid_proof
/// behavior.
inline Proof tamper_proof(Proof p) {
  if (auto* w = std::get_if<WesolowskiProof>(&p))
    w->pi ^= 1;
  else {
    auto& mids = std::get<PietrzakProof>(p).midpoints;
    if (!mids.empty()) mids.front() ^= 1;
  }
  return p;
}

/// Drives Algorithm rounds through the event queue. The state machine runs on
/// one thread; slow recoveries run as futures whose results re-enter through
/// a completion event.
class BeaconInstance {
 public:
  BeaconInstance(std::vector<Participant> participants, const Digest32& r0, SettlementPolicy policy, RoundTiming timing,
                 const SeedSource& seed, bool eject_faulty = false)
      : participants_(std::move(participants)),
        ids_(identities_of(participants_)),
        policy_(policy),
        timing_(timing),
        seed_(seed),
        eject_faulty_(eject_faulty),
        prev_beacon_(r0),
        net_(queue_, participants_.size() + 1, timing.delay) {
    timing_.validate();
    for (const auto& p : participants_) {
      active_.insert(p.identity.index);
      ledger_.balances[p.identity.index] = 0;
    }
    net_.on_deliver([this](std::size_t receiver, const Envelope<Message>& env) { deliver(receiver, env); });
  }

  const std::vector<ParticipantIdentity>& identities() const { return ids_; }
  const Ledger& ledger() const { return ledger_; }
  const Digest32& last_beacon() const { return prev_beacon_; }
  std::uint64_t next_round() const { return next_r_; }
  Tick now() const { return queue_.now(); }
  const RoundTiming& timing() const { return timing_; }
  const std::set<std::size_t>& active() const { return active_; }

  /// Runs round `r` (must be the next round) under the given behaviors;
  /// participants absent from the map are honest.
  RoundOutcome run_round(std::uint64_t r, const std::map<std::size_t, Behavior>& behaviors) {
    if (r != next_r_) throw Error(ErrorKind::sequence, "rounds must run in order");
    const Tick start = queue_.now();
    const Tick t0 = start + timing_.commit_deadline;
    const Tick t1 = start + timing_.reveal_deadline;
    state_ = open_round(r, prev_beacon_, {active_.begin(), active_.end()});
    report_ = RoundReport{};
    report_.r = r;
    report_.started = start;
    behaviors_ = behaviors;
    for (auto i : state_.roster) net_.set_online(i, behavior(i).kind != BehaviorKind::offline_commit);

    // Commit
    for (auto i : state_.roster) {
      const auto& self = participant(i);
      Bytes nonce = seed_.derive("nonce", r).derive("participant", i).next_bytes(32);
      GroupElement x = derive_round_inputs(r, prev_beacon_, self.identity, nonce);
      Tick send_at = behavior(i).kind == BehaviorKind::late_commit ? t0 : start;
      queue_.schedule(send_at, [this, i, r, x = std::move(x), send_at]() mutable {
        net_.broadcast(i, CommitMsg{r, std::move(x)}, send_at);
      });
    }
    // Commit deadline: freeze inputs, then every committer decides whether to reveal.
    at_end_of_tick(t0, [this, r, t0] {
      state_.phase = Phase::reveal;
      for (auto i : state_.roster) {
        auto in = own_commit_.find(i);
        if (in == own_commit_.end()) continue;
        const auto& b = behavior(i);
        if (b.withholds()) {
          if (b.kind == BehaviorKind::colluding_withhold) coalition_reveal(i, in->second);
          continue;
        }
        OpCounter ops;
        Reveal rv;
        {
          CountScope scope(ops);
          rv = reveal(participant(i), in->second);
        }
        report_.reveal_ops[i] = ops;
        if (b.kind == BehaviorKind::invalid_proof) rv.proof = tamper_proof(std::move(rv.proof));
        Tick send_at = t0 + timing_.reveal_cost;
        queue_.schedule(send_at, [this, i, r, rv = std::move(rv), send_at]() mutable {
          net_.broadcast(i, RevealMsg{r, std::move(rv)}, send_at);
        });
      }
    });
    at_end_of_tick(t1, [this, t1] { on_reveal_deadline(t1); });
    queue_.run();
    own_commit_.clear();
    coalition_shares_.clear();

    ledger_ = settle(state_, ledger_, policy_);
    if (eject_faulty_)
      for (auto j : state_.faulty) active_.erase(j);
    prev_beacon_ = *state_.beacon;
    ++next_r_;
    report_.finished = queue_.now();
    RoundOutcome out{make_record(state_, ledger_), state_, std::move(report_)};
    queue_.advance_to(queue_.now() + 1);
    return out;
  }

 private:
  const Participant& participant(std::size_t i) const {
    for (const auto& p : participants_)
      if (p.identity.index == i) return p;
    throw Error(ErrorKind::invalid_argument, "unknown participant");
  }

  const Behavior& behavior(std::size_t i) const {
    static const Behavior honest;
    auto it = behaviors_.find(i);
    return it == behaviors_.end() ? honest : it->second;
  }

  std::size_t observer() const { return participants_.size(); }

  // Deadlines are inclusive: re-queueing at the same tick lets every delivery
  // already scheduled for that tick run first.
  void at_end_of_tick(Tick t, EventQueue::Action action) {
    queue_.schedule(t, [this, t, action = std::move(action)]() mutable { queue_.schedule(t, std::move(action)); });
  }

  void deliver(std::size_t receiver, const Envelope<Message>& env) {
    if (const auto* c = std::get_if<CommitMsg>(&env.payload)) {
      if (c->r != state_.r) return;
      if (receiver == env.sender) own_commit_.insert_or_assign(env.sender, c->x);
      if (receiver == observer() && state_.phase == Phase::commit) accept_commit(state_, env.sender, c->x);
      return;
    }
    const auto& m = std::get<RevealMsg>(env.payload);
    if (m.r != state_.r) return;
    if (receiver == observer() && state_.phase == Phase::reveal && state_.inputs.count(env.sender))
      state_.reveals.insert_or_assign(env.sender, m.reveal);
    if (report_.coalition && receiver == report_.coalition->members.front()) coalition_observe(env);
  }

  // Coalition members evaluate their own inputs with the trapdoor and pool
  // the outputs privately instead of broadcasting them.
  void coalition_reveal(std::size_t i, const GroupElement& x) {
    if (!report_.coalition) {
      CoalitionView view;
      view.members = behavior(i).coalition;
      if (std::find(view.members.begin(), view.members.end(), i) == view.members.end()) view.members.push_back(i);
      std::sort(view.members.begin(), view.members.end());
      report_.coalition = std::move(view);
    }
    CountScope scope(report_.coalition->ops);
    coalition_shares_.insert_or_assign(i, vdf_td_eval(participant(i).identity.pp, participant(i).trapdoor, x).y);
  }

  void coalition_observe(const Envelope<Message>& env) {
    const auto& m = std::get<RevealMsg>(env.payload);
    const auto& id = identity_at(ids_, env.sender);
    if (state_.inputs.count(env.sender) && vdf_verify(id.pp, state_.inputs.at(env.sender), id.mu, m.reveal.y, m.reveal.proof))
      coalition_shares_.insert_or_assign(env.sender, m.reveal.y);
    if (report_.coalition->private_beacon) return;
    for (const auto& [i, x] : state_.inputs)
      if (!coalition_shares_.count(i)) return;
    report_.coalition->private_beacon = h_input_to_rand(aggregate_outputs(coalition_shares_));
    report_.coalition->learned_at = queue_.now();
  }

  void on_reveal_deadline(Tick t1) {
    state_ = finalize(std::move(state_), ids_);
    if (state_.phase == Phase::done) return;
    const std::size_t recoverer = choose_recoverer(state_);
    const Watermark mu = recoverer_watermark(ids_, recoverer);
    auto targets = recoverable(state_);
    std::vector<std::future<Recovery>> pending;
    for (auto j : targets)
      pending.push_back(std::async(std::launch::async, recover_one, identity_at(ids_, j), state_.inputs.at(j),
                                   recoverer, mu, std::stop_token{}));
    const Tick cost = (participant(state_.roster.front()).identity.pp.t + timing_.squarings_per_tick - 1) /
                      timing_.squarings_per_tick;
    const Tick done_at = targets.empty() ? t1 : t1 + cost;
    auto shared = std::make_shared<std::vector<std::future<Recovery>>>(std::move(pending));
    queue_.schedule(done_at, [this, shared] {
      std::vector<Recovery> recs;
      for (auto& f : *shared) recs.push_back(f.get());
      report_.recoveries = recs;
      state_ = complete_recovery(std::move(state_), std::move(recs));
    });
  }

  std::vector<Participant> participants_;
  std::vector<ParticipantIdentity> ids_;
  SettlementPolicy policy_;
  RoundTiming timing_;
  SeedSource seed_;
  bool eject_faulty_;
  Digest32 prev_beacon_;
  EventQueue queue_;
  Network<Message> net_;
  std::set<std::size_t> active_;
  Ledger ledger_;
  std::uint64_t next_r_ = 1;

  RoundState state_;
  RoundReport report_;
  std::map<std::size_t, Behavior> behaviors_;
  std::map<std::size_t, GroupElement> own_commit_;
  std::map<std::size_t, GroupElement> coalition_shares_;
};

// ===========================================================================
// JSON

inline json to_json(const ParticipantIdentity& id) {
  return json{{"index", id.index},
              {"mu", id.mu.hex()},
              {"pp", to_json(id.pp)},
              {"attestation", to_hex(id.setup_attestation)}};
}

inline ParticipantIdentity identity_from_json(const json& j) {
  return ParticipantIdentity{j.at("index").get<std::size_t>(), Watermark(from_hex(j.at("mu").get<std::string>())),
                             public_params_from_json(j.at("pp")), from_hex(j.at("attestation").get<std::string>())};
}

inline json recoverer_json(std::size_t r) { return r == public_recoverer ? json("public") : json(r); }

inline std::size_t recoverer_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "public") return public_recoverer;
  return j.get<std::size_t>();
}

inline json to_json(const Ledger& l) {
  json out = json::object();
  for (const auto& [i, b] : l.balances) out[std::to_string(i)] = b;
  return out;
}

inline Ledger ledger_from_json(const json& j) {
  Ledger l;
  for (const auto& [k, v] : j.items()) l.balances[std::stoul(k)] = v.get<std::int64_t>();
  return l;
}

inline json to_json(const BeaconRecord& rec) {
  json entries = json::array();
  for (const auto& e : rec.entries) {
    json je{{"i", e.participant}, {"x", to_hex(e.x.value())}, {"y", to_hex(e.y.value())}, {"proof", to_json(e.proof)}};
    if (e.recovered_by) je["recovered_by"] = recoverer_json(*e.recovered_by);
    entries.push_back(std::move(je));
  }
  return json{{"type", "record"},
              {"r", rec.r},
              {"prev", to_hex(rec.prev_beacon)},
              {"R", to_hex(rec.beacon)},
              {"contributors", rec.contributors},
              {"faulty", rec.faulty},
              {"entries", std::move(entries)},
              {"path", path_name(rec.path)},
              {"balances", to_json(rec.ledger)}};
}

/// Parses a record; group elements are checked against the participants'
/// moduli and malformed values raise ErrorKind::malformed.
inline BeaconRecord record_from_json(const json& j, std::span<const ParticipantIdentity> ids) {
  BeaconRecord rec;
  rec.r = j.at("r").get<std::uint64_t>();
  rec.prev_beacon = digest_from_hex(j.at("prev").get<std::string>());
  rec.beacon = digest_from_hex(j.at("R").get<std::string>());
  rec.contributors = j.at("contributors").get<std::vector<std::size_t>>();
  rec.faulty = j.at("faulty").get<std::vector<std::size_t>>();
  auto path = j.at("path").get<std::string>();
  if (path != "optimistic" && path != "pessimistic") throw Error(ErrorKind::parse, "unknown path tag");
  rec.path = path == "optimistic" ? BeaconPath::optimistic : BeaconPath::pessimistic;
  for (const auto& je : j.at("entries")) {
    RecordEntry e;
    e.participant = je.at("i").get<std::size_t>();
    const auto& n = identity_at(ids, e.participant).pp.n();
    e.x = GroupElement::in(n, bigint_from_hex(je.at("x").get<std::string>()));
    e.y = GroupElement::in(n, bigint_from_hex(je.at("y").get<std::string>()));
    e.proof = proof_from_json(je.at("proof"));
    if (je.contains("recovered_by")) e.recovered_by = recoverer_from_json(je.at("recovered_by"));
    rec.entries.push_back(std::move(e));
  }
  rec.ledger = ledger_from_json(j.at("balances"));
  return rec;
}

}  // namespace randgener
