#include "sharvot/election.hpp"

#include <algorithm>

#include "json.hpp"
#include "sharvot/error.hpp"
#include "sharvot/hash.hpp"

namespace sharvot {

namespace {

using nlohmann::json;

CandidateId ballot_id(const std::string& tag) { return CandidateId("Id" + tag); }

size_t roster_index(const std::vector<std::string>& roster, const std::string& tag) {
  auto it = std::find(roster.begin(), roster.end(), tag);
  if (it == roster.end())
    throw Error(Err::InvalidConfig, "unknown candidate: " + tag);
  return static_cast<size_t>(it - roster.begin());
}

// voter's view of a credential: verifier-only material stripped
EligibilityKey voter_view(const EligibilityKey& full) {
  EligibilityKey v = full;
  v.wrap_private = 0;
  return v;
}

// every candidate's ladder carries all votes, so an untampered script
// holds exactly one copy of the ciphertext per candidate
bool vote_in_script(const DecodedVoteScript& decoded, const Bytes& vote_ct,
                    size_t n_candidates) {
  size_t copies = 0;
  for (const auto& st : decoded.candidate_statements)
    for (const auto& slot : st.metadata)
      if (slot == vote_ct) ++copies;
  return copies == n_candidates;
}

std::vector<Opcode> selector_ops(size_t branch, size_t branch_count) {
  std::vector<Opcode> ops;
  for (const auto& sel : branch_selectors(branch, branch_count))
    ops.push_back(Opcode::push(sel));
  return ops;
}

}  // namespace

std::vector<std::string> ElectionConfig::validate() const {
  if (n == 0) throw Error(Err::InvalidConfig, "need at least one voter");
  if (t + 1 > n) throw Error(Err::InvalidConfig, "threshold t+1 exceeds voter count");
  if (fee_x == 0) throw Error(Err::InvalidConfig, "stake x must be positive");
  if (locktime == 0) throw Error(Err::InvalidConfig, "refund locktime must be positive");
  if (candidates.size() < 2) throw Error(Err::InvalidConfig, "need at least 2 candidates");
  for (const auto& c : candidates) {
    if (c.empty() || c.size() > CandidateId::kWidth - 2)
      throw Error(Err::InvalidConfig, "candidate tag must be 1..6 bytes");
    if (std::count(candidates.begin(), candidates.end(), c) != 1)
      throw Error(Err::InvalidConfig, "duplicate candidate tag: " + c);
  }
  if (!votes.empty()) {
    if (votes.size() != n)
      throw Error(Err::InvalidConfig, "votes list must have one entry per voter");
    for (const auto& v : votes) roster_index(candidates, v);
  }
  std::vector<std::string> warnings;
  if (2 * (static_cast<uint64_t>(t) + 1) <= n)
    warnings.push_back(
        "threshold t+1 <= n/2: two candidates can both reach it and ledger "
        "ordering decides; prefer t+1 > n/2");
  return warnings;
}

ElectionConfig ElectionConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Err::ParseError, std::string("config: ") + e.what());
  }
  ElectionConfig cfg;
  try {
    cfg.n = j.at("n").get<unsigned>();
    cfg.t = j.at("t").get<unsigned>();
    if (j.contains("candidates"))
      cfg.candidates = j["candidates"].get<std::vector<std::string>>();
    if (j.contains("fee_x")) cfg.fee_x = j["fee_x"].get<uint64_t>();
    if (j.contains("locktime")) cfg.locktime = j["locktime"].get<uint64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("eligibility_variant")) {
      int v = j["eligibility_variant"].get<int>();
      if (v != 1 && v != 2)
        throw Error(Err::InvalidConfig, "eligibility_variant must be 1 or 2");
      cfg.eligibility = static_cast<EligibilityVariant>(v);
    }
    if (j.contains("hardened_refund"))
      cfg.hardened_refund = j["hardened_refund"].get<bool>();
    if (j.contains("votes")) cfg.votes = j["votes"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(Err::ParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

std::string ElectionConfig::to_json() const {
  json j;
  j["n"] = n;
  j["t"] = t;
  j["candidates"] = candidates;
  j["fee_x"] = fee_x;
  j["locktime"] = locktime;
  j["seed"] = seed;
  j["eligibility_variant"] = static_cast<int>(eligibility);
  j["hardened_refund"] = hardened_refund;
  j["votes"] = votes;
  return j.dump(2);
}

DealerSetup dealer_setup(const ElectionConfig& cfg, Rng& rng) {
  cfg.validate();
  DealerSetup out;
  DealerState& d = out.dealer;
  d.sharing = {cfg.t, cfg.n, GroupElement::order()};
  d.sharing.validate();
  const mpz_class& p = d.sharing.p;

  for (const auto& tag : cfg.candidates) {
    DealerState::CandidateSecret s;
    s.tag = tag;
    s.k = 1 + rng.below_mpz(p - 1);
    s.assigned_pub = GroupElement::mul_generator(s.k);
    s.shares = split_secret(FieldElement(s.k, p), d.sharing, rng);
    d.secrets.push_back(std::move(s));
  }

  d.refund_priv = 1 + rng.below_mpz(p - 1);
  d.refund_pub = GroupElement::mul_generator(d.refund_priv);

  for (unsigned i = 1; i <= cfg.n; ++i) {
    EligibilityKey key;
    key.voter_index = i;
    key.variant = cfg.eligibility;
    if (cfg.eligibility == EligibilityVariant::XorKey) {
      key.symmetric_key = rng.bytes(256);
    } else {
      KeyPair kp = KeyPair::generate(rng);
      key.wrap_private = kp.priv;
      key.wrap_public = kp.pub;
    }
    d.eligibility.push_back(key);

    VoterState v;
    v.index = i;
    for (const auto& s : d.secrets) v.shares.emplace_back(s.tag, s.shares[i - 1]);
    v.credential = voter_view(key);
    out.voters.push_back(std::move(v));
  }
  return out;
}

CandidateState candidate_setup(const std::string& tag, const GroupElement& assigned_pub,
                               Rng& rng) {
  CandidateState c;
  c.tag = tag;
  c.key = KeyPair::generate(rng);
  c.assigned_pub = assigned_pub;
  return c;
}

PublishedBundle publish_bundle(const ElectionConfig& cfg, const DealerState& dealer,
                               const std::vector<CandidateState>& candidates) {
  PublishedBundle b;
  b.field_p = dealer.sharing.p;
  b.refund_pub = dealer.refund_pub;
  for (size_t i = 0; i < cfg.candidates.size(); ++i) {
    b.roster.push_back(cfg.candidates[i]);
    b.assigned_pubs.push_back(dealer.secrets[i].assigned_pub);
    b.candidate_pubs.push_back(candidates[i].key.pub);
  }
  return b;
}

Bytes PublishedBundle::serialize() const {
  Bytes out;
  size_t nbytes = FieldElement::byte_width(field_p);
  Bytes pbytes(nbytes);
  mpz_class tmp = field_p;
  for (size_t i = nbytes; i-- > 0;) {
    pbytes[i] = static_cast<uint8_t>(mpz_class(tmp & 0xff).get_ui());
    tmp >>= 8;
  }
  append(out, pbytes);
  for (size_t i = 0; i < roster.size(); ++i) {
    append(out, Bytes(roster[i].begin(), roster[i].end()));
    append(out, assigned_pubs[i].serialize());
    append(out, candidate_pubs[i].serialize());
  }
  append(out, refund_pub.serialize());
  return out;
}

Bytes voter_submit(VoterState& voter, const std::string& choice,
                   const PublishedBundle& published, Rng& rng) {
  if (voter.voted_for)
    throw Error(Err::DoubleVote, "voter " + std::to_string(voter.index) +
                                     " already voted");
  size_t ci = roster_index(published.roster, choice);
  auto it = std::find_if(voter.shares.begin(), voter.shares.end(),
                         [&](const auto& pr) { return pr.first == choice; });
  if (it == voter.shares.end())
    throw Error(Err::InvalidConfig, "voter holds no share for " + choice);

  VoteCommitment commit = compose_vote(it->second, ballot_id(choice));
  EncryptedVote ev = encrypt_vote(commit, published.candidate_pubs[ci], rng);
  voter.vote_ct = ev.serialize();
  voter.submission = eligibility_wrap(voter.vote_ct, voter.credential, rng);
  voter.voted_for = choice;
  return voter.submission;
}

SubmissionOutcome run_submission_round(const std::vector<Bytes>& wrapped_items,
                                       const DealerState& dealer, Rng& rng,
                                       Transport* transport) {
  SubmissionOutcome out;
  out.shuffle = run_session(wrapped_items, rng, transport);
  for (const auto& item : out.shuffle.outputs) {
    bool ok = false;
    for (const auto& key : dealer.eligibility) {
      auto inner = eligibility_unwrap(item, key);
      if (!inner) continue;
      try {
        out.accepted.push_back(EncryptedVote::parse(*inner));
        ok = true;
      } catch (const Error&) {
        // endorsed wrapper around garbage still fails the gate
      }
      break;
    }
    if (!ok) out.rejected.push_back(item);
  }
  return out;
}

VctBundle build_and_sign_vct(const ElectionConfig& cfg, const DealerState& dealer,
                             std::vector<VoterState>& voters,
                             const std::vector<CandidateState>& candidates,
                             const std::vector<EncryptedVote>& order, Ledger& ledger,
                             const TamperHook& tamper) {
  for (const auto& v : voters) {
    const UtxoEntry* e = ledger.utxo(v.funding);
    if (!e || e->amount != cfg.fee_x)
      throw Error(Err::MissingFunding,
                  "voter " + std::to_string(v.index) + " lacks a stake of " +
                      std::to_string(cfg.fee_x));
  }

  VoteScriptSpec spec;
  for (size_t i = 0; i < cfg.candidates.size(); ++i)
    spec.candidates.push_back({candidates[i].key.pub.serialize(),
                               dealer.secrets[i].assigned_pub.serialize()});
  for (const auto& ev : order) spec.votes.push_back(ev.serialize());
  spec.slot_width =
      VoteCommitment::width(dealer.sharing.p) + kCiphertextOverhead;
  spec.refund_dealer_key = dealer.refund_pub.serialize();
  if (cfg.hardened_refund)
    for (const auto& v : voters)
      spec.refund_voter_keys.push_back(v.funding_key.pub.serialize());
  spec.locktime = cfg.locktime;

  VctBundle bundle;
  bundle.redeem = build_vote_script(spec);

  // verification round: every voter locates their own ciphertext
  DecodedVoteScript preview = decode_vote_script(bundle.redeem);
  for (const auto& v : voters)
    if (!vote_in_script(preview, v.vote_ct, cfg.candidates.size()))
      throw Error(Err::VoterVerificationFailure,
                  "voter " + std::to_string(v.index) +
                      " cannot find their vote in the script");

  // window where a dishonest dealer could swap the script
  if (tamper) tamper(bundle.redeem);

  bundle.p2sh = p2sh_address(bundle.redeem);
  bundle.vct.inputs.clear();
  for (const auto& v : voters) bundle.vct.inputs.push_back({v.funding, {}});
  bundle.vct.outputs.push_back(
      {cfg.fee_x * cfg.n, p2sh_locking_script(bundle.p2sh)});

  // signing round: each voter re-checks the exact script they sign over
  DecodedVoteScript final_view = decode_vote_script(bundle.redeem);
  for (size_t i = 0; i < voters.size(); ++i) {
    if (!vote_in_script(final_view, voters[i].vote_ct, cfg.candidates.size()))
      throw Error(Err::VoterVerificationFailure,
                  "voter " + std::to_string(voters[i].index) +
                      " refused to sign: vote missing from the final script");
    Signature sig =
        sign(voters[i].funding_key.priv, tx_digest(bundle.vct, i));
    bundle.vct.inputs[i].unlocking.ops = {Opcode::push(sig)};
  }

  bundle.vote_output = {bundle.vct.txid(), 0};

  // refund transaction signed and handed out before the VCT is broadcast
  bundle.rt.inputs.push_back({bundle.vote_output, {}});
  for (const auto& v : voters)
    bundle.rt.outputs.push_back(
        {cfg.fee_x, pay_to_pubkey(v.funding_key.pub.serialize())});
  bundle.rt.locktime = cfg.locktime;
  bundle.rt_dealer_sig = sign(dealer.refund_priv, tx_digest(bundle.rt, 0));

  SubmitResult r = ledger.submit(bundle.vct);
  if (!r.accepted)
    throw Error(Err::ProtocolAbort,
                std::string("ledger rejected the commitment transaction: ") +
                    ledger_reject_name(r.reason) + " " + r.detail);
  return bundle;
}

Transaction completed_refund(const VctBundle& bundle, const ElectionConfig& cfg,
                             const VoterState& co_signer) {
  Transaction rt = bundle.rt;
  size_t branches = decode_vote_script(bundle.redeem).branch_count();
  Bytes digest = tx_digest(rt, 0);

  std::vector<Opcode> ops;
  ops.push_back(Opcode::push(bundle.rt_dealer_sig));
  if (cfg.hardened_refund) {
    ops.push_back(Opcode::simple(OpType::Op0));  // multisig dummy
    ops.push_back(Opcode::push(sign(co_signer.funding_key.priv, digest)));
  }
  append(ops, selector_ops(branches - 1, branches));
  ops.push_back(Opcode::push(bundle.redeem.serialize()));
  rt.inputs[0].unlocking.ops = std::move(ops);
  return rt;
}

std::optional<ClaimResult> candidate_claim(CandidateState& cand, Ledger& ledger,
                                           const VctBundle& bundle,
                                           const SharingConfig& sharing) {
  DecodedVoteScript decoded = decode_vote_script(bundle.redeem);
  CandidateId expect = ballot_id(cand.tag);

  cand.opened.clear();
  for (const auto& st : decoded.candidate_statements) {
    for (const auto& slot : st.metadata) {
      std::optional<VoteCommitment> commit;
      try {
        commit = try_open(EncryptedVote::parse(slot), cand.key.priv, expect,
                          sharing.p);
      } catch (const Error&) {
        continue;  // padding or foreign slot
      }
      if (!commit) continue;
      bool dup = std::any_of(cand.opened.begin(), cand.opened.end(),
                             [&](const Share& s) { return s.x == commit->share.x; });
      if (!dup) cand.opened.push_back(commit->share);
    }
  }
  if (cand.opened.size() < static_cast<size_t>(sharing.t) + 1) return std::nullopt;

  cand.reconstructed = reconstruct_secret(cand.opened, sharing).value();

  // locate this candidate's statement in the ladder
  Bytes mine = cand.key.pub.serialize();
  Bytes assigned = cand.assigned_pub.serialize();
  size_t branch = decoded.candidate_statements.size();
  for (size_t i = 0; i < decoded.candidate_statements.size(); ++i) {
    const auto& keys = decoded.candidate_statements[i].keys;
    if (keys.size() == 2 && keys[0] == mine && keys[1] == assigned) {
      branch = i;
      break;
    }
  }
  if (branch == decoded.candidate_statements.size())
    throw Error(Err::ProtocolAbort, "no script statement carries this candidate");

  ClaimResult result;
  result.tx.inputs.push_back({bundle.vote_output, {}});
  result.tx.outputs.push_back({bundle.vct.outputs[0].amount, pay_to_pubkey(mine)});
  Bytes digest = tx_digest(result.tx, 0);

  std::vector<Opcode> ops;
  ops.push_back(Opcode::simple(OpType::Op0));  // multisig dummy
  ops.push_back(Opcode::push(sign(cand.key.priv, digest)));
  ops.push_back(Opcode::push(sign(*cand.reconstructed, digest)));
  append(ops, selector_ops(branch, decoded.branch_count()));
  ops.push_back(Opcode::push(bundle.redeem.serialize()));
  result.tx.inputs[0].unlocking.ops = std::move(ops);

  result.submit = ledger.submit(result.tx);
  return result;
}

ElectionReport run_election(const ElectionConfig& cfg, const TamperHook& tamper) {
  std::vector<std::string> warnings = cfg.validate();
  if (cfg.votes.size() != cfg.n)
    throw Error(Err::InvalidConfig, "run_election needs a vote per voter");

  Rng root(cfg.seed);
  json events = json::array();

  Rng dealer_rng = root.child("dealer");
  DealerSetup setup = dealer_setup(cfg, dealer_rng);
  DealerState& dealer = setup.dealer;
  std::vector<VoterState>& voters = setup.voters;

  std::vector<CandidateState> candidates;
  for (size_t i = 0; i < cfg.candidates.size(); ++i) {
    Rng crng = root.child("candidate-" + cfg.candidates[i]);
    candidates.push_back(
        candidate_setup(cfg.candidates[i], dealer.secrets[i].assigned_pub, crng));
  }
  PublishedBundle published = publish_bundle(cfg, dealer, candidates);

  Ledger ledger;
  for (auto& v : voters) {
    Rng vrng = root.child("voter-" + std::to_string(v.index));
    v.funding_key = KeyPair::generate(vrng);
    v.funding = ledger.fund(cfg.fee_x, pay_to_pubkey(v.funding_key.pub.serialize()));
  }
  events.push_back({{"step", "funded"}, {"voters", cfg.n}, {"stake", cfg.fee_x}});

  std::vector<Bytes> wrapped;
  for (auto& v : voters) {
    Rng vrng = root.child("ballot-" + std::to_string(v.index));
    wrapped.push_back(voter_submit(v, cfg.votes[v.index - 1], published, vrng));
  }

  Rng shuffle_rng = root.child("shuffle");
  SubmissionOutcome round = run_submission_round(wrapped, dealer, shuffle_rng);
  json hops = json::array();
  for (const auto& h : round.shuffle.hops)
    hops.push_back({{"hop", h.hop}, {"from", h.from}, {"to", h.to},
                    {"wire", to_hex(h.wire)}});
  events.push_back({{"step", "submission-round"},
                    {"accepted", round.accepted.size()},
                    {"rejected", round.rejected.size()},
                    {"hops", std::move(hops)}});

  ElectionReport report;
  json j;
  j["schema_version"] = 1;
  j["config"] = json::parse(cfg.to_json());
  j["warnings"] = warnings;
  j["published"] = to_hex(published.serialize());

  VctBundle bundle;
  bool aborted = false;
  std::string abort_reason;
  try {
    bundle = build_and_sign_vct(cfg, dealer, voters, candidates, round.accepted,
                                ledger, tamper);
  } catch (const Error& e) {
    if (e.code() != Err::VoterVerificationFailure) throw;
    aborted = true;
    abort_reason = e.what();
  }

  if (aborted) {
    events.push_back({{"step", "aborted"}, {"reason", abort_reason}});
    report.outcome = "abort";
  } else {
    events.push_back({{"step", "vct-accepted"},
                      {"txid", to_hex(bundle.vct.txid())},
                      {"script", to_hex(bundle.redeem.serialize())},
                      {"rt", to_hex(bundle.rt.serialize())}});

    for (auto& cand : candidates) {
      auto claim = candidate_claim(cand, ledger, bundle, dealer.sharing);
      json ev = {{"step", "claim"}, {"candidate", cand.tag}};
      if (!claim) {
        ev["result"] = "below-threshold";
      } else {
        ev["result"] = claim->submit.accepted
                           ? "accepted"
                           : ledger_reject_name(claim->submit.reason);
        ev["txid"] = to_hex(claim->tx.txid());
        if (claim->submit.accepted && !report.winner) {
          report.winner = cand.tag;
          report.outcome = "winner";
        }
      }
      events.push_back(std::move(ev));
    }

    if (!report.winner) {
      ledger.advance(cfg.locktime - ledger.height());
      Transaction rt = completed_refund(bundle, cfg, voters[0]);
      SubmitResult r = ledger.submit(rt);
      if (!r.accepted)
        throw Error(Err::ProtocolAbort,
                    std::string("refund rejected: ") + ledger_reject_name(r.reason) +
                        " " + r.detail);
      report.outcome = "refund";
      events.push_back({{"step", "refund"}, {"txid", to_hex(rt.txid())}});
    }
  }

  j["events"] = std::move(events);
  j["outcome"] = report.outcome;
  j["winner"] = report.winner ? json(*report.winner) : json(nullptr);
  j["ledger"] = json::parse(ledger.to_json());
  report.transcript = j.dump(2);
  report.ledger = std::move(ledger);
  return report;
}

}  // namespace sharvot
