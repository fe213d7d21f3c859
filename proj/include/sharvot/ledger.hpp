#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sharvot/bytes.hpp"
#include "sharvot/script.hpp"

namespace sharvot {

struct Outpoint {
  Bytes txid;  // 32 bytes
  uint32_t index = 0;

  auto operator<=>(const Outpoint&) const = default;
};

struct TxInput {
  Outpoint prev;
  Script unlocking;
  bool operator==(const TxInput&) const = default;
};

struct TxOutput {
  uint64_t amount = 0;
  Script locking;
  bool operator==(const TxOutput&) const = default;
};

// txid = sha256 of the canonical serialization (unlocking scripts included).
struct Transaction {
  std::vector<TxInput> inputs;
  std::vector<TxOutput> outputs;
  uint64_t locktime = 0;

  Bytes serialize() const;
  static Transaction parse(const Bytes& data);  // throws Err::ParseError
  Bytes txid() const;
  bool operator==(const Transaction&) const = default;
};

// Signature message for one input: all outputs, the signed input's
// outpoint, and the locktime.  Independent of every unlocking script, so
// signatures commit to where the money goes but not to each other.
Bytes tx_digest(const Transaction& tx, size_t input_index);

enum class LedgerReject {
  None,
  UnknownOutpoint,
  DoubleSpend,
  ScriptReject,
  Locktime,
  ValueImbalance,
};

const char* ledger_reject_name(LedgerReject r);

struct SubmitResult {
  bool accepted = false;
  LedgerReject reason = LedgerReject::None;
  Reject script_reason = Reject::None;  // set when reason == ScriptReject
  std::string detail;
};

struct UtxoEntry {
  uint64_t amount = 0;
  Script locking;
};

// Single-chain UTXO simulator with a logical block-height clock.  Copyable
// value; snapshots are independent.
class Ledger {
 public:
  // Mints a fresh spendable output (no-input funding transaction).
  Outpoint fund(uint64_t amount, const Script& locking);

  SubmitResult submit(const Transaction& tx);
  void advance(uint64_t blocks) { height_ += blocks; }

  uint64_t height() const { return height_; }
  const UtxoEntry* utxo(const Outpoint& op) const;
  uint64_t total_value() const;
  const std::vector<Transaction>& accepted() const { return accepted_; }

  std::string to_json() const;  // hex scripts/txids, decimal amounts

 private:
  std::map<Outpoint, UtxoEntry> utxos_;
  std::set<Outpoint> spent_;
  std::vector<Transaction> accepted_;
  uint64_t height_ = 0;
};

}  // namespace sharvot
