#pragma once

#include "randgener/drb_engine.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace randgener {

/// Instance parameters stamped into the first transcript line.
struct InstanceHeader {
  std::size_t n = 0;
  unsigned lambda = 0;
  std::uint64_t t = 0;
  Scheme scheme = Scheme::wesolowski;
  HashSuiteId hash_suite;
  Digest32 r0{};
  SettlementPolicy policy;
  std::uint64_t seed = 0;
  bool eject_faulty = false;
  std::vector<ParticipantIdentity> identities;
};

inline json to_json(const InstanceHeader& h) {
  json ids = json::array();
  for (const auto& id : h.identities) ids.push_back(to_json(id));
  return json{{"type", "header"},
              {"n", h.n},
              {"lambda", h.lambda},
              {"T", h.t},
              {"scheme", scheme_name(h.scheme)},
              {"hash_suite", to_json(h.hash_suite)},
              {"R_0", to_hex(h.r0)},
              {"reward_unit", h.policy.reward_unit},
              {"penalty_unit", h.policy.penalty_unit},
              {"recovery_credit", h.policy.recovery_credit},
              {"seed", h.seed},
              {"eject_faulty", h.eject_faulty},
              {"identities", std::move(ids)}};
}

inline InstanceHeader header_from_json(const json& j) {
  if (j.at("type") != "header") throw Error(ErrorKind::parse, "first line is not a header");
  InstanceHeader h;
  h.n = j.at("n").get<std::size_t>();
  h.lambda = j.at("lambda").get<unsigned>();
  h.t = j.at("T").get<std::uint64_t>();
  h.scheme = parse_scheme(j.at("scheme").get<std::string>());
  h.hash_suite = hash_suite_from_json(j.at("hash_suite"));
  h.r0 = digest_from_hex(j.at("R_0").get<std::string>());
  h.policy.reward_unit = j.at("reward_unit").get<std::int64_t>();
  h.policy.penalty_unit = j.at("penalty_unit").get<std::int64_t>();
  h.policy.recovery_credit = j.at("recovery_credit").get<std::int64_t>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.eject_faulty = j.at("eject_faulty").get<bool>();
  for (const auto& id : j.at("identities")) h.identities.push_back(identity_from_json(id));
  if (h.identities.size() != h.n) throw Error(ErrorKind::parse, "identity count does not match n");
  return h;
}

namespace detail {

inline Digest32 chain_start(const std::string& header_line) {
  Bytes b;
  put_prefixed(b, std::string_view("transcript-chain"));
  put_prefixed(b, header_line);
  return sha256(b);
}

inline Digest32 chain_next(const Digest32& prev, const std::string& line) {
  Bytes b(prev.begin(), prev.end());
  put_prefixed(b, line);
  return sha256(b);
}

}  // namespace detail

/// Append-only JSON-lines writer. Each line carries a `chain` digest over the
/// previous digest and the line's own content; the header starts the chain.
class TranscriptWriter {
 public:
  TranscriptWriter(std::ostream& out, const InstanceHeader& header) : out_(out) {
    json h = to_json(header);
    chain_ = detail::chain_start(h.dump());
    h["chain"] = to_hex(chain_);
    write(h);
  }

  /// Returns the updated running digest.
  const Digest32& append(const BeaconRecord& rec) {
    if (rec.r != last_r_ + 1)
      throw Error(ErrorKind::sequence,
                  "record " + std::to_string(rec.r) + " does not follow " + std::to_string(last_r_));
    json j = to_json(rec);
    chain_ = detail::chain_next(chain_, j.dump());
    j["chain"] = to_hex(chain_);
    write(j);
    last_r_ = rec.r;
    return chain_;
  }

  const Digest32& chain() const { return chain_; }
  std::uint64_t last_round() const { return last_r_; }

 private:
  void write(const json& j) {
    out_ << j.dump() << '\n';
    out_.flush();
  }

  std::ostream& out_;
  Digest32 chain_{};
  std::uint64_t last_r_ = 0;
};

struct ReplayResult {
  bool ok = true;
  std::size_t line = 0;  // 1-based location of the first failure
  std::string reason;
  std::size_t records = 0;
  std::optional<InstanceHeader> header;
  std::vector<Digest32> beacons;

  static ReplayResult fail(std::size_t line, std::string why) {
    ReplayResult r;
    r.ok = false;
    r.line = line;
    r.reason = std::move(why);
    return r;
  }
};

/// Re-verifies a transcript from public information: canonical encoding and
/// chain digests, setup consistency, every proof, aggregate, beacon digest,
/// the R_{r-1} chain, and the ledger arithmetic. `expected_ids`, when given,
/// must match the identities stamped in the header.
inline ReplayResult replay_verify(std::istream& in,
                                  const std::optional<std::vector<ParticipantIdentity>>& expected_ids = std::nullopt) {
  std::string line;
  std::size_t lineno = 0;
  Digest32 chain{};
  auto parse_line = [&](json& j, json& body) -> std::optional<std::string> {
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      return std::string("parse error: ") + e.what();
    }
    if (!j.is_object()) return std::string("line is not an object");
    if (j.dump() != line) return std::string("non-canonical encoding");
    if (!j.contains("chain") || !j["chain"].is_string()) return std::string("missing chain digest");
    body = j;
    body.erase("chain");
    return std::nullopt;
  };

  if (!std::getline(in, line)) return ReplayResult::fail(1, "empty transcript");
  ++lineno;
  json j, body;
  if (auto err = parse_line(j, body)) return ReplayResult::fail(lineno, *err);
  InstanceHeader header;
  try {
    header = header_from_json(body);
  } catch (const std::exception& e) {
    return ReplayResult::fail(lineno, std::string("bad header: ") + e.what());
  }
  chain = detail::chain_start(body.dump());
  if (j["chain"].get<std::string>() != to_hex(chain)) return ReplayResult::fail(lineno, "header chain digest mismatch");
  if (expected_ids) {
    if (expected_ids->size() != header.identities.size()) return ReplayResult::fail(lineno, "identity set differs");
    for (std::size_t i = 0; i < expected_ids->size(); ++i)
      if (to_json((*expected_ids)[i]) != to_json(header.identities[i]))
        return ReplayResult::fail(lineno, "identity set differs");
  }
  if (!drb_verify_setup(header.identities, header.t, header.scheme, header.hash_suite).ok())
    return ReplayResult::fail(lineno, "setup verification failed");

  ReplayResult result;
  Digest32 prev = header.r0;
  Ledger ledger;
  std::set<std::size_t> roster;
  for (const auto& id : header.identities) {
    ledger.balances[id.index] = 0;
    roster.insert(id.index);
  }
  std::uint64_t last_r = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto err = parse_line(j, body)) return ReplayResult::fail(lineno, *err);
    chain = detail::chain_next(chain, body.dump());
    if (j["chain"].get<std::string>() != to_hex(chain)) return ReplayResult::fail(lineno, "chain digest mismatch");
    BeaconRecord rec;
    try {
      if (body.at("type") != "record") return ReplayResult::fail(lineno, "unexpected line type");
      rec = record_from_json(body, header.identities);
    } catch (const std::exception& e) {
      return ReplayResult::fail(lineno, std::string("bad record: ") + e.what());
    }
    if (rec.r != last_r + 1) return ReplayResult::fail(lineno, "round index not consecutive");
    std::set<std::size_t> seen(rec.contributors.begin(), rec.contributors.end());
    seen.insert(rec.faulty.begin(), rec.faulty.end());
    if (seen != roster) return ReplayResult::fail(lineno, "contributors and faulty do not cover the roster");
    auto check = verify_beacon_record(header.identities, rec, prev, &ledger, &header.policy);
    if (!check.ok) return ReplayResult::fail(lineno, check.reason);
    prev = rec.beacon;
    ledger = rec.ledger;
    last_r = rec.r;
    result.beacons.push_back(rec.beacon);
    if (header.eject_faulty)
      for (auto f : rec.faulty) roster.erase(f);
    ++result.records;
  }
  result.line = lineno;
  result.header = std::move(header);
  return result;
}

}  // namespace randgener
