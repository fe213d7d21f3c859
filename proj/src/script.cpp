#include "sharvot/script.hpp"

#include <algorithm>
#include <sstream>

#include "sharvot/hash.hpp"
#include "sharvot/crypto.hpp"

namespace sharvot {

namespace {

// canonical byte table
constexpr uint8_t kOp0 = 0x00;
constexpr uint8_t kPushData1 = 0x4c;
constexpr uint8_t kPushData2 = 0x4d;
constexpr uint8_t kOp1 = 0x51;  // ..0x60 for OP_16
constexpr uint8_t kOpIf = 0x63;
constexpr uint8_t kOpElse = 0x67;
constexpr uint8_t kOpEndIf = 0x68;
constexpr uint8_t kOpDrop = 0x75;
constexpr uint8_t kOpEqual = 0x87;
constexpr uint8_t kOpHash160 = 0xa9;
constexpr uint8_t kOpCheckSig = 0xac;
constexpr uint8_t kOpCheckMultiSig = 0xae;
constexpr uint8_t kOpCltv = 0xb1;

// minimal little-endian script number, non-negative only
Bytes encode_num(uint64_t v) {
  Bytes out;
  while (v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    v >>= 8;
  }
  if (!out.empty() && (out.back() & 0x80)) out.push_back(0x00);
  return out;
}

std::optional<uint64_t> decode_num(const Bytes& b) {
  if (b.size() > 9) return std::nullopt;
  uint64_t v = 0;
  for (size_t i = b.size(); i-- > 0;) {
    if (i == 8 && b[i] != 0) return std::nullopt;
    if (i < 8) v = (v << 8) | b[i];
  }
  if (!b.empty() && (b.back() & 0x80)) return std::nullopt;  // negatives unused here
  return v;
}

bool truthy(const Bytes& b) {
  return std::any_of(b.begin(), b.end(), [](uint8_t c) { return c != 0; });
}

}  // namespace

Opcode Opcode::push(Bytes payload) {
  if (payload.size() > kMaxPushSize)
    throw Error(Err::MetadataOversize, "push payload too large");
  if (payload.empty()) return simple(OpType::Op0);  // canonical empty push
  return {OpType::Push, std::move(payload), 0};
}

Opcode Opcode::op_n(unsigned n) {
  if (n < 1 || n > 16) throw Error(Err::InvalidConfig, "OP_N takes 1..16");
  return {OpType::OpN, {}, n};
}

Bytes Script::serialize() const {
  Bytes out;
  for (const auto& op : ops) {
    switch (op.type) {
      case OpType::Push: {
        size_t len = op.data.size();
        if (len < kPushData1) {
          out.push_back(static_cast<uint8_t>(len));
        } else if (len <= 0xff) {
          out.push_back(kPushData1);
          out.push_back(static_cast<uint8_t>(len));
        } else {
          out.push_back(kPushData2);
          out.push_back(static_cast<uint8_t>(len & 0xff));
          out.push_back(static_cast<uint8_t>(len >> 8));
        }
        append(out, op.data);
        break;
      }
      case OpType::Op0: out.push_back(kOp0); break;
      case OpType::OpN: out.push_back(static_cast<uint8_t>(kOp1 + op.small_n - 1)); break;
      case OpType::If: out.push_back(kOpIf); break;
      case OpType::Else: out.push_back(kOpElse); break;
      case OpType::EndIf: out.push_back(kOpEndIf); break;
      case OpType::Drop: out.push_back(kOpDrop); break;
      case OpType::Equal: out.push_back(kOpEqual); break;
      case OpType::Hash160: out.push_back(kOpHash160); break;
      case OpType::CheckSig: out.push_back(kOpCheckSig); break;
      case OpType::CheckMultiSig: out.push_back(kOpCheckMultiSig); break;
      case OpType::CheckLockTimeVerify: out.push_back(kOpCltv); break;
    }
  }
  return out;
}

Script Script::parse(const Bytes& data) {
  Script s;
  size_t off = 0;
  int depth = 0;
  while (off < data.size()) {
    uint8_t b = data[off++];
    if (b == kOp0) {
      s.ops.push_back(Opcode::simple(OpType::Op0));
    } else if (b >= 1 && b < kPushData1) {
      if (off + b > data.size()) throw Error(Err::ParseError, "truncated push");
      s.ops.push_back(Opcode::push(Bytes(data.begin() + off, data.begin() + off + b)));
      off += b;
    } else if (b == kPushData1 || b == kPushData2) {
      size_t lenlen = (b == kPushData1) ? 1 : 2;
      if (off + lenlen > data.size()) throw Error(Err::ParseError, "truncated push length");
      size_t len = data[off];
      if (lenlen == 2) len |= static_cast<size_t>(data[off + 1]) << 8;
      off += lenlen;
      if (len > kMaxPushSize) throw Error(Err::ParseError, "push too large");
      if (off + len > data.size()) throw Error(Err::ParseError, "truncated push");
      s.ops.push_back(Opcode::push(Bytes(data.begin() + off, data.begin() + off + len)));
      off += len;
    } else if (b >= kOp1 && b <= kOp1 + 15) {
      s.ops.push_back(Opcode::op_n(b - kOp1 + 1));
    } else {
      switch (b) {
        case kOpIf: s.ops.push_back(Opcode::simple(OpType::If)); ++depth; break;
        case kOpElse:
          if (depth <= 0) throw Error(Err::ParseError, "OP_ELSE outside conditional");
          s.ops.push_back(Opcode::simple(OpType::Else));
          break;
        case kOpEndIf:
          if (depth <= 0) throw Error(Err::ParseError, "unbalanced OP_ENDIF");
          s.ops.push_back(Opcode::simple(OpType::EndIf));
          --depth;
          break;
        case kOpDrop: s.ops.push_back(Opcode::simple(OpType::Drop)); break;
        case kOpEqual: s.ops.push_back(Opcode::simple(OpType::Equal)); break;
        case kOpHash160: s.ops.push_back(Opcode::simple(OpType::Hash160)); break;
        case kOpCheckSig: s.ops.push_back(Opcode::simple(OpType::CheckSig)); break;
        case kOpCheckMultiSig: s.ops.push_back(Opcode::simple(OpType::CheckMultiSig)); break;
        case kOpCltv: s.ops.push_back(Opcode::simple(OpType::CheckLockTimeVerify)); break;
        default: throw Error(Err::ParseError, "unknown opcode byte");
      }
    }
  }
  if (depth != 0) throw Error(Err::ParseError, "unbalanced OP_IF");
  return s;
}

std::string Script::to_asm() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& op : ops) {
    if (!first) out << ' ';
    first = false;
    switch (op.type) {
      case OpType::Push: out << '<' << to_hex(op.data) << '>'; break;
      case OpType::Op0: out << "OP_0"; break;
      case OpType::OpN: out << "OP_" << op.small_n; break;
      case OpType::If: out << "OP_IF"; break;
      case OpType::Else: out << "OP_ELSE"; break;
      case OpType::EndIf: out << "OP_ENDIF"; break;
      case OpType::Drop: out << "OP_DROP"; break;
      case OpType::Equal: out << "OP_EQUAL"; break;
      case OpType::Hash160: out << "OP_HASH160"; break;
      case OpType::CheckSig: out << "OP_CHECKSIG"; break;
      case OpType::CheckMultiSig: out << "OP_CHECKMULTISIG"; break;
      case OpType::CheckLockTimeVerify: out << "OP_CHECKLOCKTIMEVERIFY"; break;
    }
  }
  return out.str();
}

Bytes p2sh_address(const Script& redeem) { return hash160(redeem.serialize()); }

Script p2sh_locking_script(const Bytes& digest) {
  if (digest.size() != 20) throw Error(Err::InvalidConfig, "p2sh digest must be 20 bytes");
  Script s;
  s.ops = {Opcode::simple(OpType::Hash160), Opcode::push(digest),
           Opcode::simple(OpType::Equal)};
  return s;
}

Script pay_to_pubkey(const Bytes& pubkey) {
  Script s;
  s.ops = {Opcode::push(pubkey), Opcode::simple(OpType::CheckSig)};
  return s;
}

Script build_multisig(unsigned m, const std::vector<Bytes>& signer_keys,
                      const std::vector<Bytes>& metadata, size_t max_metadata_size) {
  if (m < 1 || m > signer_keys.size())
    throw Error(Err::InvalidConfig, "need 1 <= m <= number of signer keys");
  size_t total = signer_keys.size() + metadata.size();
  if (total > kMaxMultisigSlots)
    throw Error(Err::SlotOverflow, "multisig output allows at most 15 key slots");
  for (const auto& item : metadata)
    if (item.size() > max_metadata_size)
      throw Error(Err::MetadataOversize, "metadata item exceeds slot size");

  Script s;
  s.ops.push_back(Opcode::op_n(m));
  for (const auto& item : metadata) s.ops.push_back(Opcode::push(item));
  for (const auto& key : signer_keys) s.ops.push_back(Opcode::push(key));
  s.ops.push_back(Opcode::op_n(static_cast<unsigned>(total)));
  s.ops.push_back(Opcode::simple(OpType::CheckMultiSig));
  return s;
}

std::vector<Bytes> branch_selectors(size_t branch_index, size_t branch_count) {
  if (branch_count < 1 || branch_index >= branch_count)
    throw Error(Err::InvalidConfig, "branch index out of range");
  // conditionals popped outermost-first; the last branch is the final ELSE
  size_t if_count = branch_count - 1;
  std::vector<Bytes> sel;
  size_t depth = std::min(branch_index + 1, if_count);
  // innermost selector pushed first
  for (size_t level = depth; level-- > 0;) {
    bool take = (level == branch_index);
    sel.push_back(take ? Bytes{0x01} : Bytes{});
  }
  return sel;
}

Script build_vote_script(const VoteScriptSpec& spec) {
  if (spec.candidates.empty()) throw Error(Err::InvalidConfig, "no candidates");
  if (spec.slot_width == 0 || spec.slot_width > kMaxSlotSize)
    throw Error(Err::InvalidConfig, "bad metadata slot width");
  for (const auto& v : spec.votes)
    if (v.size() != spec.slot_width)
      throw Error(Err::WidthMismatch, "vote does not match the slot width");

  // candidate ladders: every statement is 2-of-15 with 13 vote slots
  std::vector<Script> branches;
  size_t chunk_count =
      std::max<size_t>(1, (spec.votes.size() + kVoteSlotsPerStatement - 1) /
                              kVoteSlotsPerStatement);
  for (const auto& cand : spec.candidates) {
    for (size_t c = 0; c < chunk_count; ++c) {
      std::vector<Bytes> slots;
      for (size_t k = 0; k < kVoteSlotsPerStatement; ++k) {
        size_t idx = c * kVoteSlotsPerStatement + k;
        slots.push_back(idx < spec.votes.size() ? spec.votes[idx]
                                                : Bytes(spec.slot_width, 0));
      }
      branches.push_back(build_multisig(2, {cand.candidate_key, cand.dealer_key}, slots,
                                        spec.slot_width));
    }
  }

  // refund statement, behind the locktime
  Script refund;
  refund.ops.push_back(Opcode::push(encode_num(spec.locktime)));
  refund.ops.push_back(Opcode::simple(OpType::CheckLockTimeVerify));
  refund.ops.push_back(Opcode::simple(OpType::Drop));
  if (spec.refund_voter_keys.empty()) {
    append(refund.ops, pay_to_pubkey(spec.refund_dealer_key).ops);
  } else {
    // dealer signature AND any one voter: multisig result gates a checksig
    Script ms = build_multisig(1, spec.refund_voter_keys, {});
    append(refund.ops, ms.ops);
    refund.ops.push_back(Opcode::simple(OpType::If));
    refund.ops.push_back(Opcode::push(spec.refund_dealer_key));
    refund.ops.push_back(Opcode::simple(OpType::CheckSig));
    refund.ops.push_back(Opcode::simple(OpType::Else));
    refund.ops.push_back(Opcode::simple(OpType::Op0));
    refund.ops.push_back(Opcode::simple(OpType::EndIf));
  }
  branches.push_back(refund);

  // nest: IF b0 ELSE IF b1 ELSE ... bn ENDIF... ENDIF
  Script out;
  size_t if_count = branches.size() - 1;
  for (size_t i = 0; i < if_count; ++i) {
    out.ops.push_back(Opcode::simple(OpType::If));
    append(out.ops, branches[i].ops);
    out.ops.push_back(Opcode::simple(OpType::Else));
  }
  append(out.ops, branches.back().ops);
  for (size_t i = 0; i < if_count; ++i) out.ops.push_back(Opcode::simple(OpType::EndIf));

  if (out.serialize().size() > spec.max_script_size)
    throw Error(Err::ScriptTooLarge, "vote script exceeds the configured size cap");
  return out;
}

DecodedVoteScript decode_vote_script(const Script& script) {
  DecodedVoteScript out;
  const auto& ops = script.ops;
  size_t i = 0;
  auto expect = [&](bool cond, const char* msg) {
    if (!cond) throw Error(Err::ParseError, msg);
  };

  // walk the IF ladder
  size_t depth = 0;
  for (;;) {
    expect(i < ops.size(), "truncated vote script");
    if (ops[i].type == OpType::If) {
      ++i;
      ++depth;
      // candidate statement: OP_2 pushes... OP_15 CHECKMULTISIG
      expect(ops[i].type == OpType::OpN, "expected multisig m");
      DecodedStatement st;
      st.required_sigs = ops[i].small_n;
      ++i;
      std::vector<Bytes> pushes;
      while (i < ops.size() && ops[i].type == OpType::Push) {
        pushes.push_back(ops[i].data);
        ++i;
      }
      expect(i < ops.size() && ops[i].type == OpType::OpN, "expected multisig n");
      st.total_slots = ops[i].small_n;
      ++i;
      expect(i < ops.size() && ops[i].type == OpType::CheckMultiSig,
             "expected OP_CHECKMULTISIG");
      ++i;
      expect(pushes.size() == st.total_slots, "slot count mismatch");
      // key slots are trailing group elements; metadata is everything else
      size_t keys = st.required_sigs;
      expect(pushes.size() >= keys, "fewer slots than required signatures");
      st.metadata.assign(pushes.begin(), pushes.end() - keys);
      st.keys.assign(pushes.end() - keys, pushes.end());
      out.candidate_statements.push_back(std::move(st));
      expect(i < ops.size() && ops[i].type == OpType::Else, "expected OP_ELSE");
      ++i;
      continue;
    }
    break;
  }

  // refund statement
  expect(i < ops.size() &&
             (ops[i].type == OpType::Push || ops[i].type == OpType::Op0),
         "expected locktime push");
  auto lt = decode_num(ops[i].data);
  expect(lt.has_value(), "bad locktime number");
  out.locktime = *lt;
  ++i;
  expect(i < ops.size() && ops[i].type == OpType::CheckLockTimeVerify, "expected CLTV");
  ++i;
  expect(i < ops.size() && ops[i].type == OpType::Drop, "expected OP_DROP");
  ++i;
  if (ops[i].type == OpType::Push) {
    // simple variant: <S> OP_CHECKSIG
    out.refund_dealer_key = ops[i].data;
    ++i;
    expect(i < ops.size() && ops[i].type == OpType::CheckSig, "expected OP_CHECKSIG");
    ++i;
  } else {
    // hardened: OP_1 V1..Vn OP_n CHECKMULTISIG IF <S> CHECKSIG ELSE OP_0 ENDIF
    expect(ops[i].type == OpType::OpN && ops[i].small_n == 1, "expected OP_1");
    ++i;
    while (i < ops.size() && ops[i].type == OpType::Push) {
      out.refund_voter_keys.push_back(ops[i].data);
      ++i;
    }
    expect(i < ops.size() && ops[i].type == OpType::OpN, "expected voter key count");
    expect(ops[i].small_n == out.refund_voter_keys.size(), "voter key count mismatch");
    ++i;
    expect(i < ops.size() && ops[i].type == OpType::CheckMultiSig, "expected multisig");
    ++i;
    expect(i < ops.size() && ops[i].type == OpType::If, "expected OP_IF");
    ++i;
    expect(i < ops.size() && ops[i].type == OpType::Push, "expected dealer key");
    out.refund_dealer_key = ops[i].data;
    ++i;
    expect(i + 3 < ops.size() && ops[i].type == OpType::CheckSig &&
               ops[i + 1].type == OpType::Else && ops[i + 2].type == OpType::Op0 &&
               ops[i + 3].type == OpType::EndIf,
           "bad hardened refund tail");
    i += 4;
  }

  // closing ENDIFs
  for (size_t d = 0; d < depth; ++d) {
    expect(i < ops.size() && ops[i].type == OpType::EndIf, "expected OP_ENDIF");
    ++i;
  }
  expect(i == ops.size(), "trailing opcodes after vote script");
  return out;
}

const char* reject_name(Reject r) {
  switch (r) {
    case Reject::None: return "none";
    case Reject::BadSignature: return "bad-signature";
    case Reject::LocktimeNotMet: return "locktime-not-met";
    case Reject::UnbalancedConditional: return "unbalanced-conditional";
    case Reject::HashMismatch: return "hash-mismatch";
    case Reject::StackUnderflow: return "stack-underflow";
    case Reject::Malformed: return "malformed";
  }
  return "unknown";
}

namespace {

struct Interp {
  std::vector<Bytes> stack;
  const ExecutionContext& ctx;

  EvalResult fail(Reject r, const std::string& detail) { return {false, r, detail}; }

  std::optional<EvalResult> run(const Script& script) {
    std::vector<bool> cond;      // execution state per open IF
    std::vector<bool> cond_met;  // whether any arm at this depth already ran

    auto executing = [&] {
      return std::all_of(cond.begin(), cond.end(), [](bool b) { return b; });
    };

    for (const auto& op : script.ops) {
      if (!executing() && op.type != OpType::If && op.type != OpType::Else &&
          op.type != OpType::EndIf) {
        continue;
      }
      switch (op.type) {
        case OpType::Push: stack.push_back(op.data); break;
        case OpType::Op0: stack.emplace_back(); break;
        case OpType::OpN: stack.push_back(encode_num(op.small_n)); break;
        case OpType::If: {
          bool take = false;
          if (executing()) {
            if (stack.empty()) return fail(Reject::StackUnderflow, "OP_IF on empty stack");
            take = truthy(stack.back());
            stack.pop_back();
          }
          cond.push_back(take);
          cond_met.push_back(take);
          break;
        }
        case OpType::Else: {
          if (cond.empty())
            return fail(Reject::UnbalancedConditional, "OP_ELSE without OP_IF");
          cond.back() = !cond_met.back();
          if (cond.back()) cond_met.back() = true;
          break;
        }
        case OpType::EndIf: {
          if (cond.empty())
            return fail(Reject::UnbalancedConditional, "OP_ENDIF without OP_IF");
          cond.pop_back();
          cond_met.pop_back();
          break;
        }
        case OpType::Drop: {
          if (stack.empty()) return fail(Reject::StackUnderflow, "OP_DROP on empty stack");
          stack.pop_back();
          break;
        }
        case OpType::Equal: {
          if (stack.size() < 2) return fail(Reject::StackUnderflow, "OP_EQUAL needs 2 items");
          Bytes a = std::move(stack.back());
          stack.pop_back();
          Bytes b = std::move(stack.back());
          stack.pop_back();
          stack.push_back(a == b ? Bytes{0x01} : Bytes{});
          break;
        }
        case OpType::Hash160: {
          if (stack.empty()) return fail(Reject::StackUnderflow, "OP_HASH160 on empty stack");
          Bytes top = std::move(stack.back());
          stack.pop_back();
          stack.push_back(hash160(top));
          break;
        }
        case OpType::CheckSig: {
          if (stack.size() < 2)
            return fail(Reject::StackUnderflow, "OP_CHECKSIG needs sig and key");
          Bytes key = std::move(stack.back());
          stack.pop_back();
          Bytes sig = std::move(stack.back());
          stack.pop_back();
          bool ok = GroupElement::parseable(key) &&
                    verify(GroupElement::parse(key), ctx.sighash, sig);
          stack.push_back(ok ? Bytes{0x01} : Bytes{});
          break;
        }
        case OpType::CheckMultiSig: {
          if (stack.empty()) return fail(Reject::StackUnderflow, "missing key count");
          auto n = decode_num(stack.back());
          stack.pop_back();
          if (!n || *n > kMaxMultisigSlots) return fail(Reject::Malformed, "bad key count");
          if (stack.size() < *n) return fail(Reject::StackUnderflow, "missing key slots");
          std::vector<Bytes> slots(*n);  // in push order
          for (size_t k = *n; k-- > 0;) {
            slots[k] = std::move(stack.back());
            stack.pop_back();
          }
          if (stack.empty()) return fail(Reject::StackUnderflow, "missing sig count");
          auto m = decode_num(stack.back());
          stack.pop_back();
          if (!m || *m > *n) return fail(Reject::Malformed, "bad sig count");
          if (stack.size() < *m) return fail(Reject::StackUnderflow, "missing signatures");
          std::vector<Bytes> sigs(*m);  // in push order
          for (size_t k = *m; k-- > 0;) {
            sigs[k] = std::move(stack.back());
            stack.pop_back();
          }
          if (stack.empty())
            return fail(Reject::StackUnderflow, "missing multisig dummy element");
          stack.pop_back();  // historical extra element

          // signatures must match key slots in order; metadata slots are
          // not valid keys and simply never match
          size_t slot = 0;
          bool ok = true;
          for (const auto& sig : sigs) {
            bool matched = false;
            while (slot < slots.size()) {
              const Bytes& cand = slots[slot++];
              if (GroupElement::parseable(cand) &&
                  verify(GroupElement::parse(cand), ctx.sighash, sig)) {
                matched = true;
                break;
              }
            }
            if (!matched) {
              ok = false;
              break;
            }
          }
          stack.push_back(ok ? Bytes{0x01} : Bytes{});
          break;
        }
        case OpType::CheckLockTimeVerify: {
          if (stack.empty()) return fail(Reject::StackUnderflow, "CLTV on empty stack");
          auto target = decode_num(stack.back());  // value stays on the stack
          if (!target) return fail(Reject::Malformed, "bad CLTV operand");
          if (ctx.height < *target)
            return fail(Reject::LocktimeNotMet,
                        "height " + std::to_string(ctx.height) + " < " +
                            std::to_string(*target));
          break;
        }
      }
    }
    if (!cond.empty()) return fail(Reject::UnbalancedConditional, "unclosed OP_IF");
    return std::nullopt;  // keep going
  }
};

bool is_p2sh_pattern(const Script& s) {
  return s.ops.size() == 3 && s.ops[0].type == OpType::Hash160 &&
         s.ops[1].type == OpType::Push && s.ops[1].data.size() == 20 &&
         s.ops[2].type == OpType::Equal;
}

}  // namespace

EvalResult evaluate(const Script& locking, const Script& unlocking,
                    const ExecutionContext& ctx) {
  for (const auto& op : unlocking.ops) {
    if (op.type != OpType::Push && op.type != OpType::Op0 && op.type != OpType::OpN)
      return {false, Reject::Malformed, "unlocking script must be push-only"};
  }

  Interp interp{{}, ctx};
  if (auto res = interp.run(unlocking)) return *res;

  if (is_p2sh_pattern(locking)) {
    if (interp.stack.empty())
      return {false, Reject::StackUnderflow, "missing redeem script"};
    Bytes redeem_bytes = std::move(interp.stack.back());
    interp.stack.pop_back();
    if (hash160(redeem_bytes) != locking.ops[1].data)
      return {false, Reject::HashMismatch, "redeem script does not hash to the address"};
    Script redeem;
    try {
      redeem = Script::parse(redeem_bytes);
    } catch (const Error& e) {
      return {false, Reject::Malformed, e.what()};
    }
    if (auto res = interp.run(redeem)) return *res;
  } else {
    if (auto res = interp.run(locking)) return *res;
  }

  if (interp.stack.empty() || !truthy(interp.stack.back()))
    return {false, Reject::BadSignature, "final stack value is false"};
  return {true, Reject::None, ""};
}

}  // namespace sharvot
