#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sharvot/bytes.hpp"
#include "sharvot/error.hpp"

namespace sharvot {

enum class OpType : uint8_t {
  Push,
  Op0,
  OpN,  // OP_1..OP_16
  If,
  Else,
  EndIf,
  Drop,
  Equal,
  Hash160,
  CheckSig,
  CheckMultiSig,
  CheckLockTimeVerify,
};

struct Opcode {
  OpType type;
  Bytes data;       // Push payload (<= 520 bytes)
  unsigned small_n = 0;  // OpN value, 1..16

  static Opcode push(Bytes payload);
  static Opcode op_n(unsigned n);
  static Opcode simple(OpType t) { return {t, {}, 0}; }
  bool operator==(const Opcode&) const = default;
};

// 520 bytes is the standardness cap for key/metadata slots; the outer
// pushes carrying a whole redeem script may be larger.
constexpr size_t kMaxSlotSize = 520;
constexpr size_t kMaxPushSize = 16000;

// Ordered opcode list with a canonical byte form (Bitcoin-style byte
// table, documented in docs/script_format.md).
struct Script {
  std::vector<Opcode> ops;

  Bytes serialize() const;
  static Script parse(const Bytes& data);  // throws Err::ParseError
  std::string to_asm() const;              // one-line disassembly
  bool operator==(const Script&) const = default;
};

Bytes p2sh_address(const Script& redeem);         // hash160 of canonical bytes
Script p2sh_locking_script(const Bytes& digest);  // OP_HASH160 <20B> OP_EQUAL
Script pay_to_pubkey(const Bytes& pubkey);        // <pk> OP_CHECKSIG

// metadata entries first, then real keys
Script build_multisig(unsigned m, const std::vector<Bytes>& signer_keys,
                      const std::vector<Bytes>& metadata, size_t max_metadata_size = 64);

struct VoteScriptSpec {
  struct CandidateKeys {
    Bytes candidate_key;  // M_C, published by the candidate
    Bytes dealer_key;     // P_C, assigned by the dealer
  };
  std::vector<CandidateKeys> candidates;
  std::vector<Bytes> votes;  // encrypted votes; every candidate ladder carries all of them
  size_t slot_width = 0;     // metadata slot width; unfilled slots zero-padded
  Bytes refund_dealer_key;   // S = k x G
  std::vector<Bytes> refund_voter_keys;  // non-empty enables the 1-of-n co-sign variant
  uint64_t locktime = 0;
  size_t max_script_size = 10000;
};

constexpr unsigned kMaxMultisigSlots = 15;
constexpr unsigned kVoteSlotsPerStatement = 13;

// IF/ELSE ladder: per candidate, ceil(votes/13) 2-of-15 statements, then
// the timelocked refund statement.
Script build_vote_script(const VoteScriptSpec& spec);

// branch selection: push items appended on top of the witness data; the
// outermost IF pops the topmost selector
std::vector<Bytes> branch_selectors(size_t branch_index, size_t branch_count);

struct DecodedStatement {
  unsigned required_sigs = 0;
  unsigned total_slots = 0;
  std::vector<Bytes> metadata;  // zero-padding slots included
  std::vector<Bytes> keys;
};

struct DecodedVoteScript {
  std::vector<DecodedStatement> candidate_statements;  // ladder order
  uint64_t locktime = 0;
  Bytes refund_dealer_key;
  std::vector<Bytes> refund_voter_keys;
  size_t branch_count() const { return candidate_statements.size() + 1; }
};

DecodedVoteScript decode_vote_script(const Script& script);  // throws Err::ParseError

enum class Reject {
  None,
  BadSignature,
  LocktimeNotMet,
  UnbalancedConditional,
  HashMismatch,
  StackUnderflow,
  Malformed,
};

const char* reject_name(Reject r);

struct EvalResult {
  bool accepted = false;
  Reject reason = Reject::None;
  std::string detail;
};

struct ExecutionContext {
  Bytes sighash;       // digest signatures in this input must cover
  uint64_t height = 0; // logical clock for OP_CHECKLOCKTIMEVERIFY
};

// Standard stack semantics: run the (push-only) unlocking script, then
// the locking script; a P2SH locking pattern hashes and then executes the
// supplied redeem script.
EvalResult evaluate(const Script& locking, const Script& unlocking,
                    const ExecutionContext& ctx);

}  // namespace sharvot
