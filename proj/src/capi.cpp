#include "sharvot.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "json.hpp"
#include "sharvot/election.hpp"
#include "sharvot/error.hpp"

using namespace sharvot;

namespace {

thread_local std::string g_error;

sharvot_status fail(sharvot_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

sharvot_status from_exception(const Error& e) {
  switch (e.code()) {
    case Err::ParseError:
      return fail(SHARVOT_ERR_PARSE, e.what());
    case Err::InvalidConfig:
      return fail(SHARVOT_ERR_INVALID_ARGUMENT, e.what());
    default:
      return fail(SHARVOT_ERR_PROTOCOL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct sharvot_election {
  ElectionConfig cfg;
  bool ran = false;
  std::string outcome;
  std::optional<std::string> winner;
  std::string transcript;
};

extern "C" {

const char* sharvot_last_error(void) { return g_error.c_str(); }

void sharvot_free(void* p) { std::free(p); }

sharvot_status sharvot_election_create(const char* config_json,
                                       sharvot_election** out) {
  if (!config_json || !out)
    return fail(SHARVOT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  try {
    ElectionConfig cfg = ElectionConfig::from_json(config_json);
    cfg.validate();
    *out = new sharvot_election{std::move(cfg)};
    return SHARVOT_OK;
  } catch (const Error& e) {
    return from_exception(e);
  }
}

void sharvot_election_free(sharvot_election* e) { delete e; }

sharvot_status sharvot_election_set_seed(sharvot_election* e, uint64_t seed) {
  if (!e) return fail(SHARVOT_ERR_INVALID_ARGUMENT, "null handle");
  if (e->ran) return fail(SHARVOT_ERR_STATE, "election already ran");
  e->cfg.seed = seed;
  return SHARVOT_OK;
}

sharvot_status sharvot_election_run(sharvot_election* e) {
  if (!e) return fail(SHARVOT_ERR_INVALID_ARGUMENT, "null handle");
  if (e->ran) return fail(SHARVOT_ERR_STATE, "election already ran");
  try {
    ElectionReport rep = run_election(e->cfg);
    e->outcome = rep.outcome;
    e->winner = rep.winner;
    e->transcript = std::move(rep.transcript);
    e->ran = true;
    return SHARVOT_OK;
  } catch (const Error& err) {
    return from_exception(err);
  }
}

const char* sharvot_election_outcome(const sharvot_election* e) {
  return (e && e->ran) ? e->outcome.c_str() : nullptr;
}

const char* sharvot_election_winner(const sharvot_election* e) {
  return (e && e->ran && e->winner) ? e->winner->c_str() : nullptr;
}

const char* sharvot_election_transcript(const sharvot_election* e) {
  return (e && e->ran) ? e->transcript.c_str() : nullptr;
}

sharvot_status sharvot_shuffle_run(const uint8_t* const* items,
                                   const size_t* lens, size_t n,
                                   uint64_t seed, char** json_out) {
  if (!items || !lens || !json_out || n == 0)
    return fail(SHARVOT_ERR_INVALID_ARGUMENT, "need at least one item");
  *json_out = nullptr;
  try {
    std::vector<Bytes> inputs;
    for (size_t i = 0; i < n; ++i) {
      if (!items[i]) return fail(SHARVOT_ERR_INVALID_ARGUMENT, "null item");
      inputs.emplace_back(items[i], items[i] + lens[i]);
    }
    Rng rng(seed);
    ShuffleOutcome out = run_session(inputs, rng);

    nlohmann::json j;
    j["inputs"] = nlohmann::json::array();
    for (const auto& b : inputs) j["inputs"].push_back(to_hex(b));
    j["outputs"] = nlohmann::json::array();
    for (const auto& b : out.outputs) j["outputs"].push_back(to_hex(b));
    j["hops"] = nlohmann::json::array();
    for (const auto& h : out.hops)
      j["hops"].push_back({{"hop", h.hop},
                           {"from", h.from},
                           {"to", h.to},
                           {"bytes", h.wire.size()}});
    *json_out = dup_string(j.dump(2));
    return SHARVOT_OK;
  } catch (const Error& e) {
    return from_exception(e);
  }
}

sharvot_status sharvot_script_inspect(const char* hex, char** report_out) {
  if (!hex || !report_out)
    return fail(SHARVOT_ERR_INVALID_ARGUMENT, "null argument");
  *report_out = nullptr;
  try {
    Script script = Script::parse(from_hex(hex));
    std::string report = script.to_asm() + "\n";

    try {
      DecodedVoteScript d = decode_vote_script(script);
      report += "\nvote script: " +
                std::to_string(d.candidate_statements.size()) +
                " candidate statements, refund locktime " +
                std::to_string(d.locktime) + "\n";
      for (size_t i = 0; i < d.candidate_statements.size(); ++i) {
        const auto& st = d.candidate_statements[i];
        report += "statement " + std::to_string(i) + ": " +
                  std::to_string(st.required_sigs) + "-of-" +
                  std::to_string(st.total_slots) + ", " +
                  std::to_string(st.metadata.size()) + " metadata slots\n";
        for (const auto& m : st.metadata)
          report += "  slot: " + to_hex(m) + "\n";
        for (const auto& k : st.keys) report += "  key:  " + to_hex(k) + "\n";
      }
      report += "refund key: " + to_hex(d.refund_dealer_key) + "\n";
      for (const auto& k : d.refund_voter_keys)
        report += "refund co-signer: " + to_hex(k) + "\n";
    } catch (const Error&) {
      // not a vote ladder; plain disassembly is the whole report
    }

    *report_out = dup_string(report);
    return SHARVOT_OK;
  } catch (const Error& e) {
    return from_exception(e);
  }
}

}  // extern "C"
