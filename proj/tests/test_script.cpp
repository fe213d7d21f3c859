#include "doctest.h"
#include "sharvot/crypto.hpp"
#include "sharvot/script.hpp"

using namespace sharvot;

namespace {

Bytes pk_bytes(const KeyPair& kp) { return kp.pub.serialize(); }

Script unlock(std::initializer_list<Bytes> pushes) {
  Script s;
  for (const auto& p : pushes)
    s.ops.push_back(p.empty() ? Opcode::simple(OpType::Op0) : Opcode::push(p));
  return s;
}

// random valid script generator for the parse/serialize identity corpus
Script random_script(Rng& rng) {
  Script s;
  unsigned len = 1 + static_cast<unsigned>(rng.below(12));
  unsigned open_ifs = 0;
  for (unsigned i = 0; i < len; ++i) {
    switch (rng.below(8)) {
      case 0: s.ops.push_back(Opcode::push(rng.bytes(rng.below(100)))); break;
      case 1: s.ops.push_back(Opcode::push(rng.bytes(200 + rng.below(320)))); break;
      case 2: s.ops.push_back(Opcode::simple(OpType::Op0)); break;
      case 3: s.ops.push_back(Opcode::op_n(1 + static_cast<unsigned>(rng.below(16)))); break;
      case 4:
        s.ops.push_back(Opcode::simple(OpType::If));
        ++open_ifs;
        break;
      case 5:
        if (open_ifs) {
          s.ops.push_back(Opcode::simple(OpType::EndIf));
          --open_ifs;
        }
        break;
      case 6: s.ops.push_back(Opcode::simple(OpType::Hash160)); break;
      default: s.ops.push_back(Opcode::simple(OpType::CheckMultiSig)); break;
    }
  }
  while (open_ifs--) s.ops.push_back(Opcode::simple(OpType::EndIf));
  return s;
}

}  // namespace

TEST_CASE("golden shape: 1-of-3 with two metadata slots") {
  Rng rng(1);
  KeyPair p1 = KeyPair::generate(rng);
  Bytes m1 = rng.bytes(64), m2 = rng.bytes(64);
  Script s = build_multisig(1, {pk_bytes(p1)}, {m1, m2});

  REQUIRE(s.ops.size() == 6);
  CHECK(s.ops[0] == Opcode::op_n(1));
  CHECK(s.ops[1] == Opcode::push(m1));
  CHECK(s.ops[2] == Opcode::push(m2));
  CHECK(s.ops[3] == Opcode::push(pk_bytes(p1)));
  CHECK(s.ops[4] == Opcode::op_n(3));
  CHECK(s.ops[5].type == OpType::CheckMultiSig);
  CHECK(s.to_asm().find("OP_1") == 0);
  CHECK(s.to_asm().find("OP_3 OP_CHECKMULTISIG") != std::string::npos);
}

TEST_CASE("boundary shape: 2-of-15, no metadata") {
  Rng rng(2);
  std::vector<Bytes> keys;
  for (int i = 0; i < 15; ++i) keys.push_back(pk_bytes(KeyPair::generate(rng)));
  Script s = build_multisig(2, keys, {});
  REQUIRE(s.ops.size() == 18);
  CHECK(s.ops[0] == Opcode::op_n(2));
  CHECK(s.ops[16] == Opcode::op_n(15));
}

TEST_CASE("slot overflow and oversize metadata rejected") {
  Rng rng(3);
  std::vector<Bytes> keys{pk_bytes(KeyPair::generate(rng)), pk_bytes(KeyPair::generate(rng))};
  std::vector<Bytes> meta14(14, Bytes(64, 1));
  CHECK_THROWS_AS(build_multisig(1, keys, meta14), Error);  // 16 slots
  CHECK_THROWS_AS(build_multisig(1, keys, {Bytes(65, 1)}), Error);  // > 64B default
  CHECK_NOTHROW(build_multisig(1, keys, {Bytes(65, 1)}, 128));      // widened slots
}

TEST_CASE("multisig evaluation: valid signature accepts, wrong digest rejects") {
  Rng rng(4);
  KeyPair p1 = KeyPair::generate(rng);
  Script redeem = build_multisig(1, {pk_bytes(p1)}, {rng.bytes(64), rng.bytes(64)});
  Bytes digest = rng.bytes(32);
  Signature sig = sign(p1.priv, digest);

  Script locking = p2sh_locking_script(p2sh_address(redeem));
  Script unlocking = unlock({Bytes{}, sig, redeem.serialize()});
  ExecutionContext ctx{digest, 0};
  EvalResult r = evaluate(locking, unlocking, ctx);
  CHECK(r.accepted);

  ExecutionContext wrong{rng.bytes(32), 0};
  EvalResult bad = evaluate(locking, unlocking, wrong);
  CHECK_FALSE(bad.accepted);
  CHECK(bad.reason == Reject::BadSignature);
}

TEST_CASE("p2sh redeem script must hash to the address") {
  Rng rng(5);
  KeyPair p1 = KeyPair::generate(rng);
  Script redeem = pay_to_pubkey(pk_bytes(p1));
  Script locking = p2sh_locking_script(p2sh_address(redeem));
  Script other = pay_to_pubkey(pk_bytes(KeyPair::generate(rng)));
  Bytes digest = rng.bytes(32);
  EvalResult r = evaluate(locking, unlock({sign(p1.priv, digest), other.serialize()}),
                          {digest, 0});
  CHECK_FALSE(r.accepted);
  CHECK(r.reason == Reject::HashMismatch);
}

TEST_CASE("locktime boundary pair") {
  Rng rng(6);
  KeyPair dealer = KeyPair::generate(rng);
  Script redeem;
  redeem.ops = {Opcode::push({0x05}), Opcode::simple(OpType::CheckLockTimeVerify),
                Opcode::simple(OpType::Drop), Opcode::push(pk_bytes(dealer)),
                Opcode::simple(OpType::CheckSig)};
  Script locking = p2sh_locking_script(p2sh_address(redeem));
  Bytes digest = rng.bytes(32);
  Script unlocking = unlock({sign(dealer.priv, digest), redeem.serialize()});

  EvalResult before = evaluate(locking, unlocking, {digest, 4});
  CHECK_FALSE(before.accepted);
  CHECK(before.reason == Reject::LocktimeNotMet);

  EvalResult at = evaluate(locking, unlocking, {digest, 5});
  CHECK(at.accepted);
}

TEST_CASE("stack underflow and unbalanced conditional rejects") {
  Rng rng(7);
  Script empty_unlock;
  Script need_sig = pay_to_pubkey(pk_bytes(KeyPair::generate(rng)));
  EvalResult r1 = evaluate(need_sig, empty_unlock, {rng.bytes(32), 0});
  CHECK(r1.reason == Reject::StackUnderflow);

  Script dangling_else;
  dangling_else.ops = {Opcode::simple(OpType::Else)};
  EvalResult r2 = evaluate(dangling_else, unlock({Bytes{1}}), {rng.bytes(32), 0});
  CHECK(r2.reason == Reject::UnbalancedConditional);
}

TEST_CASE("parse/serialize identity on 1000 generated scripts") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    Script s = random_script(rng);
    Bytes wire = s.serialize();
    CHECK(Script::parse(wire) == s);
    CHECK(Script::parse(wire).serialize() == wire);
  }
}

TEST_CASE("parse rejects malformed bytes") {
  CHECK_THROWS_AS(Script::parse({0x63}), Error);              // unclosed IF
  CHECK_THROWS_AS(Script::parse({0x68}), Error);              // stray ENDIF
  CHECK_THROWS_AS(Script::parse({0x05, 0x01}), Error);        // truncated push
  CHECK_THROWS_AS(Script::parse({0xfe}), Error);              // unknown opcode
}

namespace {

struct VoteFixture {
  Rng rng{100};
  KeyPair ma, pa, mb, pb, refund_dealer, voter1;
  VoteScriptSpec spec;
  std::vector<Bytes> votes;

  VoteFixture(unsigned n_votes, size_t slot_width = 121, uint64_t locktime = 10,
              bool hardened = true) {
    ma = KeyPair::generate(rng);
    pa = KeyPair::generate(rng);
    mb = KeyPair::generate(rng);
    pb = KeyPair::generate(rng);
    refund_dealer = KeyPair::generate(rng);
    voter1 = KeyPair::generate(rng);
    for (unsigned i = 0; i < n_votes; ++i) votes.push_back(rng.bytes(slot_width));
    spec.candidates = {{pk_bytes(ma), pk_bytes(pa)}, {pk_bytes(mb), pk_bytes(pb)}};
    spec.votes = votes;
    spec.slot_width = slot_width;
    spec.refund_dealer_key = pk_bytes(refund_dealer);
    if (hardened) spec.refund_voter_keys = {pk_bytes(voter1)};
    spec.locktime = locktime;
  }
};

}  // namespace

TEST_CASE("vote script: 2 candidates, 4 voters -> 2 branches of 13 slots") {
  VoteFixture f(4);
  Script s = build_vote_script(f.spec);
  DecodedVoteScript d = decode_vote_script(s);
  REQUIRE(d.candidate_statements.size() == 2);
  for (const auto& st : d.candidate_statements) {
    CHECK(st.required_sigs == 2);
    CHECK(st.total_slots == 15);
    CHECK(st.metadata.size() == 13);
    unsigned used = 0, padded = 0;
    for (const auto& m : st.metadata)
      (contains_bytes(m, Bytes(121, 0)) && m == Bytes(121, 0)) ? ++padded : ++used;
    CHECK(used == 4);
    CHECK(padded == 9);
  }
  CHECK(d.locktime == 10);
  CHECK(d.refund_voter_keys.size() == 1);
  // all votes recoverable from the decoded metadata
  for (const auto& v : f.votes) {
    bool found = false;
    for (const auto& m : d.candidate_statements[0].metadata)
      if (m == v) found = true;
    CHECK(found);
  }
}

TEST_CASE("vote script chunking: 20 voters -> 2 statements per candidate") {
  VoteFixture f(20);
  Script s = build_vote_script(f.spec);
  DecodedVoteScript d = decode_vote_script(s);
  CHECK(d.candidate_statements.size() == 4);  // ceil(20/13)=2 chunks x 2 candidates
}

TEST_CASE("vote script size cap") {
  VoteFixture f(20);
  f.spec.max_script_size = 1000;
  CHECK_THROWS_AS(build_vote_script(f.spec), Error);
}

TEST_CASE("exactly one branch accepts a given unlocking script") {
  VoteFixture f(3);
  Script redeem = build_vote_script(f.spec);
  Script locking = p2sh_locking_script(p2sh_address(redeem));
  DecodedVoteScript d = decode_vote_script(redeem);
  size_t branches = d.branch_count();
  Bytes digest = f.rng.bytes(32);

  // candidate A spends branch 0 (their only chunk)
  for (size_t target = 0; target < branches - 1; ++target) {
    const KeyPair& mc = (target == 0) ? f.ma : f.mb;
    const KeyPair& pc = (target == 0) ? f.pa : f.pb;
    for (size_t chosen = 0; chosen < branches; ++chosen) {
      Script u;
      u.ops.push_back(Opcode::simple(OpType::Op0));
      u.ops.push_back(Opcode::push(sign(mc.priv, digest)));
      u.ops.push_back(Opcode::push(sign(pc.priv, digest)));
      for (const auto& sel : branch_selectors(chosen, branches))
        u.ops.push_back(sel.empty() ? Opcode::simple(OpType::Op0) : Opcode::push(sel));
      u.ops.push_back(Opcode::push(redeem.serialize()));
      EvalResult r = evaluate(locking, u, {digest, 100});
      CHECK(r.accepted == (chosen == target));
    }
  }
}

TEST_CASE("hardened refund branch needs dealer plus one voter") {
  VoteFixture f(3, 121, 10, true);
  Script redeem = build_vote_script(f.spec);
  Script locking = p2sh_locking_script(p2sh_address(redeem));
  DecodedVoteScript d = decode_vote_script(redeem);
  size_t refund_idx = d.branch_count() - 1;
  Bytes digest = f.rng.bytes(32);

  auto make_unlock = [&](const KeyPair& dealer, const KeyPair& voter) {
    Script u;
    u.ops.push_back(Opcode::push(sign(dealer.priv, digest)));
    u.ops.push_back(Opcode::simple(OpType::Op0));
    u.ops.push_back(Opcode::push(sign(voter.priv, digest)));
    for (const auto& sel : branch_selectors(refund_idx, d.branch_count()))
      u.ops.push_back(sel.empty() ? Opcode::simple(OpType::Op0) : Opcode::push(sel));
    u.ops.push_back(Opcode::push(redeem.serialize()));
    return u;
  };

  CHECK(evaluate(locking, make_unlock(f.refund_dealer, f.voter1), {digest, 10}).accepted);
  // before the locktime
  EvalResult early = evaluate(locking, make_unlock(f.refund_dealer, f.voter1), {digest, 9});
  CHECK(early.reason == Reject::LocktimeNotMet);
  // dealer alone (bad voter sig)
  CHECK_FALSE(evaluate(locking, make_unlock(f.refund_dealer, f.ma), {digest, 10}).accepted);
  // voter alone (bad dealer sig)
  CHECK_FALSE(evaluate(locking, make_unlock(f.ma, f.voter1), {digest, 10}).accepted);
}

TEST_CASE("simple refund variant: scriptPubKey under the dealer key") {
  VoteFixture f(2, 121, 0, false);  // degenerate locktime: spendable immediately
  Script redeem = build_vote_script(f.spec);
  DecodedVoteScript d = decode_vote_script(redeem);
  CHECK(d.refund_voter_keys.empty());
  Script locking = p2sh_locking_script(p2sh_address(redeem));
  Bytes digest = f.rng.bytes(32);
  Script u;
  u.ops.push_back(Opcode::push(sign(f.refund_dealer.priv, digest)));
  for (const auto& sel : branch_selectors(d.branch_count() - 1, d.branch_count()))
    u.ops.push_back(sel.empty() ? Opcode::simple(OpType::Op0) : Opcode::push(sel));
  u.ops.push_back(Opcode::push(redeem.serialize()));
  CHECK(evaluate(locking, u, {digest, 0}).accepted);
}

TEST_CASE("p2sh address is deterministic hash160") {
  Rng rng(9);
  Script s = pay_to_pubkey(pk_bytes(KeyPair::generate(rng)));
  CHECK(p2sh_address(s).size() == 20);
  CHECK(p2sh_address(s) == p2sh_address(s));
}
