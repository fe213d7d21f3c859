#include "sharvot/ledger.hpp"

#include "json.hpp"

#include "sharvot/error.hpp"
#include "sharvot/hash.hpp"

namespace sharvot {

namespace {

void append_script(Bytes& out, const Script& s) {
  Bytes wire = s.serialize();
  append_u32_be(out, static_cast<uint32_t>(wire.size()));
  append(out, wire);
}

void append_outpoint(Bytes& out, const Outpoint& op) {
  append(out, op.txid);
  append_u32_be(out, op.index);
}

}  // namespace

Bytes Transaction::serialize() const {
  Bytes out;
  append_u32_be(out, static_cast<uint32_t>(inputs.size()));
  for (const auto& in : inputs) {
    append_outpoint(out, in.prev);
    append_script(out, in.unlocking);
  }
  append_u32_be(out, static_cast<uint32_t>(outputs.size()));
  for (const auto& o : outputs) {
    append_u64_be(out, o.amount);
    append_script(out, o.locking);
  }
  append_u64_be(out, locktime);
  return out;
}

Transaction Transaction::parse(const Bytes& data) {
  Transaction tx;
  size_t off = 0;
  auto need = [&](size_t n) {
    if (off + n > data.size()) throw Error(Err::ParseError, "truncated transaction");
  };
  auto read_script = [&]() {
    need(4);
    uint32_t len = read_u32_be(data, off);
    off += 4;
    need(len);
    Script s = Script::parse(Bytes(data.begin() + off, data.begin() + off + len));
    off += len;
    return s;
  };
  need(4);
  uint32_t nin = read_u32_be(data, off);
  off += 4;
  for (uint32_t i = 0; i < nin; ++i) {
    TxInput in;
    need(36);
    in.prev.txid.assign(data.begin() + off, data.begin() + off + 32);
    off += 32;
    in.prev.index = read_u32_be(data, off);
    off += 4;
    in.unlocking = read_script();
    tx.inputs.push_back(std::move(in));
  }
  need(4);
  uint32_t nout = read_u32_be(data, off);
  off += 4;
  for (uint32_t i = 0; i < nout; ++i) {
    TxOutput o;
    need(8);
    o.amount = read_u64_be(data, off);
    off += 8;
    o.locking = read_script();
    tx.outputs.push_back(std::move(o));
  }
  need(8);
  tx.locktime = read_u64_be(data, off);
  off += 8;
  if (off != data.size()) throw Error(Err::ParseError, "trailing transaction bytes");
  return tx;
}

Bytes Transaction::txid() const { return sha256(serialize()); }

Bytes tx_digest(const Transaction& tx, size_t input_index) {
  if (input_index >= tx.inputs.size())
    throw Error(Err::InvalidConfig, "input index out of range");
  Bytes msg{'s', 'i', 'g', 'h', 'a', 's', 'h'};
  append_outpoint(msg, tx.inputs[input_index].prev);
  append_u32_be(msg, static_cast<uint32_t>(tx.outputs.size()));
  for (const auto& o : tx.outputs) {
    append_u64_be(msg, o.amount);
    append_script(msg, o.locking);
  }
  append_u64_be(msg, tx.locktime);
  return sha256(msg);
}

const char* ledger_reject_name(LedgerReject r) {
  switch (r) {
    case LedgerReject::None: return "none";
    case LedgerReject::UnknownOutpoint: return "unknown-outpoint";
    case LedgerReject::DoubleSpend: return "double-spend";
    case LedgerReject::ScriptReject: return "script-reject";
    case LedgerReject::Locktime: return "locktime";
    case LedgerReject::ValueImbalance: return "value-imbalance";
  }
  return "?";
}

Outpoint Ledger::fund(uint64_t amount, const Script& locking) {
  Transaction mint;
  // a pseudo-input keyed by the current ledger shape keeps mint txids unique
  TxInput tag;
  tag.prev.txid = sha256(Bytes{'m', 'i', 'n', 't'});
  tag.prev.index = static_cast<uint32_t>(accepted_.size());
  mint.inputs.push_back(tag);
  mint.outputs.push_back({amount, locking});
  Outpoint op{mint.txid(), 0};
  utxos_[op] = {amount, locking};
  accepted_.push_back(std::move(mint));
  return op;
}

const UtxoEntry* Ledger::utxo(const Outpoint& op) const {
  auto it = utxos_.find(op);
  return it == utxos_.end() ? nullptr : &it->second;
}

uint64_t Ledger::total_value() const {
  uint64_t sum = 0;
  for (const auto& [op, e] : utxos_) sum += e.amount;
  return sum;
}

SubmitResult Ledger::submit(const Transaction& tx) {
  if (tx.inputs.empty())
    return {false, LedgerReject::UnknownOutpoint, Reject::None, "no inputs"};
  if (tx.locktime > height_)
    return {false, LedgerReject::Locktime, Reject::None,
            "locktime " + std::to_string(tx.locktime) + " > height " +
                std::to_string(height_)};

  uint64_t in_value = 0;
  std::set<Outpoint> seen;
  for (const auto& in : tx.inputs) {
    if (!seen.insert(in.prev).second)
      return {false, LedgerReject::DoubleSpend, Reject::None,
              "outpoint spent twice within the transaction"};
    auto it = utxos_.find(in.prev);
    if (it == utxos_.end()) {
      if (spent_.count(in.prev))
        return {false, LedgerReject::DoubleSpend, Reject::None,
                "outpoint already spent"};
      return {false, LedgerReject::UnknownOutpoint, Reject::None,
              "outpoint not found"};
    }
    in_value += it->second.amount;
  }

  uint64_t out_value = 0;
  for (const auto& o : tx.outputs) out_value += o.amount;
  if (out_value > in_value)
    return {false, LedgerReject::ValueImbalance, Reject::None,
            "outputs exceed inputs"};

  for (size_t i = 0; i < tx.inputs.size(); ++i) {
    const UtxoEntry& entry = utxos_.at(tx.inputs[i].prev);
    ExecutionContext ctx{tx_digest(tx, i), height_};
    EvalResult r = evaluate(entry.locking, tx.inputs[i].unlocking, ctx);
    if (!r.accepted)
      return {false, LedgerReject::ScriptReject, r.reason,
              "input " + std::to_string(i) + ": " + std::string(reject_name(r.reason)) +
                  (r.detail.empty() ? "" : " (" + r.detail + ")")};
  }

  // all checks passed; apply atomically
  Bytes id = tx.txid();
  for (const auto& in : tx.inputs) {
    utxos_.erase(in.prev);
    spent_.insert(in.prev);
  }
  for (uint32_t i = 0; i < tx.outputs.size(); ++i)
    utxos_[{id, i}] = {tx.outputs[i].amount, tx.outputs[i].locking};
  accepted_.push_back(tx);
  return {true, LedgerReject::None, Reject::None, ""};
}

std::string Ledger::to_json() const {
  nlohmann::json j;
  j["height"] = height_;
  j["utxos"] = nlohmann::json::array();
  for (const auto& [op, e] : utxos_) {
    j["utxos"].push_back({{"txid", to_hex(op.txid)},
                          {"index", op.index},
                          {"amount", e.amount},
                          {"script", to_hex(e.locking.serialize())}});
  }
  j["transactions"] = nlohmann::json::array();
  for (const auto& tx : accepted_) {
    nlohmann::json t;
    t["txid"] = to_hex(tx.txid());
    t["locktime"] = tx.locktime;
    t["inputs"] = nlohmann::json::array();
    for (const auto& in : tx.inputs)
      t["inputs"].push_back({{"txid", to_hex(in.prev.txid)},
                             {"index", in.prev.index},
                             {"unlocking", to_hex(in.unlocking.serialize())}});
    t["outputs"] = nlohmann::json::array();
    for (const auto& o : tx.outputs)
      t["outputs"].push_back(
          {{"amount", o.amount}, {"script", to_hex(o.locking.serialize())}});
    j["transactions"].push_back(std::move(t));
  }
  return j.dump(2);
}

}  // namespace sharvot
