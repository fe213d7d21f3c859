#include "sharvot/circle_shuffle.hpp"

#include <algorithm>
#include <cstring>

namespace sharvot {

Bytes Sso::serialize() const {
  Bytes out;
  append_u32_be(out, static_cast<uint32_t>(entries.size()));
  for (const auto& e : entries) {
    append_u32_be(out, static_cast<uint32_t>(e.size()));
    append(out, e);
  }
  return out;
}

Sso Sso::parse(const Bytes& data) {
  Sso sso;
  size_t off = 0;
  uint32_t count = read_u32_be(data, off);
  off += 4;
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t len = read_u32_be(data, off);
    off += 4;
    if (off + len > data.size()) throw Error(Err::ParseError, "truncated SSO entry");
    sso.entries.emplace_back(data.begin() + off, data.begin() + off + len);
    off += len;
  }
  if (off != data.size()) throw Error(Err::ParseError, "trailing bytes after SSO");
  return sso;
}

Bytes ShuffleMessage::serialize() const {
  Bytes out(session_id.begin(), session_id.end());
  append_u16_be(out, hop);
  append_u32_be(out, static_cast<uint32_t>(ciphertext.size()));
  append(out, ciphertext);
  return out;
}

ShuffleMessage ShuffleMessage::parse(const Bytes& data) {
  if (data.size() < 22) throw Error(Err::ParseError, "shuffle message too short");
  ShuffleMessage m;
  std::memcpy(m.session_id.data(), data.data(), 16);
  m.hop = read_u16_be(data, 16);
  uint32_t len = read_u32_be(data, 18);
  if (22 + len != data.size()) throw Error(Err::ParseError, "bad shuffle message length");
  m.ciphertext.assign(data.begin() + 22, data.end());
  return m;
}

ShuffleSession::ShuffleSession(SessionId id, unsigned index, unsigned n, KeyPair keypair,
                               std::vector<GroupElement> roster, GroupElement ephemeral_pub,
                               std::optional<mpz_class> ephemeral_priv)
    : id_(id),
      index_(index),
      n_(n),
      keypair_(std::move(keypair)),
      roster_(std::move(roster)),
      ephemeral_pub_(std::move(ephemeral_pub)),
      ephemeral_priv_(std::move(ephemeral_priv)) {
  if (index_ < 1 || index_ > n_ || roster_.size() != n_)
    throw Error(Err::InvalidConfig, "bad shuffle session indexing");
  if (ephemeral_priv_.has_value() != (index_ == 1))
    throw Error(Err::InvalidConfig, "only participant 1 holds the ephemeral private key");
}

Sso ShuffleSession::open_incoming(const ShuffleMessage& incoming) {
  if (incoming.session_id != id_)
    throw Error(Err::DecryptionFailure, "message for a different session");
  Bytes plain;
  try {
    plain = decrypt(keypair_.priv, Ciphertext::parse(incoming.ciphertext));
  } catch (const Error&) {
    throw Error(Err::DecryptionFailure, "mis-routed or corrupted shuffle message");
  }
  Sso sso = Sso::parse(plain);
  observed_entries_ = sso.entries;
  return sso;
}

ShuffleMessage ShuffleSession::seal(const Sso& sso, unsigned hop, Rng& rng) const {
  ShuffleMessage msg;
  msg.session_id = id_;
  msg.hop = static_cast<uint16_t>(hop);
  msg.ciphertext = encrypt(roster_[successor() - 1], sso.serialize(), rng).serialize();
  return msg;
}

ShuffleMessage ShuffleSession::shuffle_step(const std::optional<ShuffleMessage>& incoming,
                                            const Bytes& my_item, Rng& rng) {
  if (phase_ != ShufflePhase::Init) throw Error(Err::PhaseViolation, "shuffle_step done already");
  phase_ = ShufflePhase::Shuffling;

  Sso sso;
  if (index_ == 1) {
    if (incoming) throw Error(Err::PhaseViolation, "participant 1 starts the loop");
    observed_entries_.clear();
  } else {
    if (!incoming) throw Error(Err::PhaseViolation, "non-initial participant needs a message");
    sso = open_incoming(*incoming);
  }

  my_entry_ct_ = encrypt(keypair_.pub, my_item, rng).serialize();
  sso.entries.push_back(my_entry_ct_);

  // Fisher-Yates over entry positions, recorded for replay checks
  std::vector<size_t> perm(sso.entries.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<Bytes> shuffled(sso.entries.size());
  for (size_t i = 0; i < perm.size(); ++i) shuffled[i] = std::move(sso.entries[perm[i]]);
  sso.entries = std::move(shuffled);
  last_permutation_ = perm;

  phase_ = ShufflePhase::Unveiling;
  return seal(sso, index_, rng);
}

ShuffleMessage ShuffleSession::unveil_step(const ShuffleMessage& incoming, Rng& rng) {
  if (phase_ != ShufflePhase::Unveiling)
    throw Error(Err::PhaseViolation, "unveil before shuffle completed");
  Sso sso = open_incoming(incoming);

  auto it = std::find(sso.entries.begin(), sso.entries.end(), my_entry_ct_);
  if (it == sso.entries.end())
    throw Error(Err::EntryNotFound, "own entry missing from the SSO");

  Bytes my_item = decrypt(keypair_.priv, Ciphertext::parse(*it));
  *it = encrypt(ephemeral_pub_, my_item, rng).serialize();  // position unchanged

  phase_ = ShufflePhase::Done;
  last_permutation_.clear();
  return seal(sso, n_ + index_, rng);
}

std::vector<Bytes> ShuffleSession::finalize(const ShuffleMessage& incoming) {
  if (index_ != 1 || !ephemeral_priv_)
    throw Error(Err::PhaseViolation, "only participant 1 finalizes");
  if (phase_ != ShufflePhase::Done)
    throw Error(Err::PhaseViolation, "finalize before unveiling");
  Sso sso = open_incoming(incoming);
  std::vector<Bytes> items;
  items.reserve(sso.entries.size());
  for (const auto& e : sso.entries) {
    try {
      items.push_back(decrypt(*ephemeral_priv_, Ciphertext::parse(e)));
    } catch (const Error&) {
      throw Error(Err::ProtocolAbort, "entry failed ephemeral-key decryption");
    }
  }
  return items;
}

void InMemoryTransport::send(unsigned to, const ShuffleMessage& msg) {
  if (abort_at_hop_ && msg.hop == *abort_at_hop_)
    throw Error(Err::ProtocolAbort, "participant dropped out at hop " + std::to_string(msg.hop));
  // serialize/parse round trip: what travels is bytes
  inbox_.emplace_back(to, ShuffleMessage::parse(msg.serialize()));
}

ShuffleMessage InMemoryTransport::receive(unsigned at) {
  for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
    if (it->first == at) {
      ShuffleMessage m = std::move(it->second);
      inbox_.erase(it);
      return m;
    }
  }
  throw Error(Err::ProtocolAbort, "no message for participant " + std::to_string(at));
}

ShuffleOutcome run_session(const std::vector<Bytes>& items, Rng& rng, Transport* transport) {
  const unsigned n = static_cast<unsigned>(items.size());
  if (n < 1) throw Error(Err::InvalidConfig, "shuffle needs at least one participant");

  InMemoryTransport fallback;
  Transport& net = transport ? *transport : fallback;

  SessionId sid{};
  Bytes sid_bytes = rng.bytes(16);
  std::copy(sid_bytes.begin(), sid_bytes.end(), sid.begin());

  std::vector<Rng> member_rng;
  std::vector<KeyPair> keys;
  std::vector<GroupElement> roster;
  for (unsigned i = 1; i <= n; ++i) {
    member_rng.push_back(rng.child("participant-" + std::to_string(i)));
    keys.push_back(KeyPair::generate(member_rng.back()));
    roster.push_back(keys.back().pub);
  }
  KeyPair ephemeral = KeyPair::generate(member_rng[0]);

  std::vector<ShuffleSession> sessions;
  for (unsigned i = 1; i <= n; ++i) {
    sessions.emplace_back(sid, i, n, keys[i - 1], roster, ephemeral.pub,
                          i == 1 ? std::optional<mpz_class>(ephemeral.priv) : std::nullopt);
  }

  ShuffleOutcome outcome;
  auto record = [&](unsigned hop, unsigned from, unsigned to, const ShuffleMessage& msg) {
    outcome.hops.push_back({hop, from, to, msg.serialize(), {}, {}});
  };
  auto note_receiver_view = [&](const ShuffleSession& s) {
    if (!outcome.hops.empty()) outcome.hops.back().receiver_view = s.last_observed_entries();
  };

  // shuffle loop
  for (unsigned i = 1; i <= n; ++i) {
    ShuffleSession& s = sessions[i - 1];
    std::optional<ShuffleMessage> incoming;
    if (i > 1) {
      incoming = net.receive(i);
      // receiver view of the message recorded against the hop that carried it
    }
    ShuffleMessage out = s.shuffle_step(incoming, items[i - 1], member_rng[i - 1]);
    note_receiver_view(s);
    unsigned to = (i == n) ? 1 : i + 1;
    net.send(to, out);
    record(i, i, to, out);
    outcome.hops.back().permutation = s.last_permutation();
  }

  // unveil loop
  for (unsigned i = 1; i <= n; ++i) {
    ShuffleSession& s = sessions[i - 1];
    ShuffleMessage incoming = net.receive(i);
    ShuffleMessage out = s.unveil_step(incoming, member_rng[i - 1]);
    note_receiver_view(s);
    unsigned to = (i == n) ? 1 : i + 1;
    net.send(to, out);
    record(n + i, i, to, out);
  }

  ShuffleMessage last = net.receive(1);
  outcome.outputs = sessions[0].finalize(last);
  if (!outcome.hops.empty())
    outcome.hops.back().receiver_view = sessions[0].last_observed_entries();
  return outcome;
}

}  // namespace sharvot
