#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sharvot/circle_shuffle.hpp"
#include "sharvot/ledger.hpp"
#include "sharvot/shamir.hpp"
#include "sharvot/vote.hpp"

namespace sharvot {

struct ElectionConfig {
  unsigned n = 0;            // voters
  unsigned t = 0;            // t+1 shares reconstruct
  std::vector<std::string> candidates{"A", "B"};
  uint64_t fee_x = 1;        // per-voter stake
  uint64_t locktime = 10;    // refund ΔT, logical blocks
  uint64_t seed = 0;         // root of all randomness
  EligibilityVariant eligibility = EligibilityVariant::PublicKey;
  bool hardened_refund = true;  // refund needs a voter co-signature
  std::vector<std::string> votes;  // per-voter candidate tag, size n

  // throws Err::InvalidConfig on hard violations; returns advisory warnings
  std::vector<std::string> validate() const;
  static ElectionConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct DealerState {
  struct CandidateSecret {
    std::string tag;
    mpz_class k;                 // private; never leaves the dealer
    GroupElement assigned_pub;   // P_C = k x G
    std::vector<Share> shares;   // k_{C,1}..k_{C,n}
  };
  SharingConfig sharing;
  std::vector<CandidateSecret> secrets;
  std::vector<EligibilityKey> eligibility;  // verifier-side credential list
  mpz_class refund_priv;        // k
  GroupElement refund_pub;      // S = k x G
};

struct CandidateState {
  std::string tag;
  KeyPair key;                  // (s_C, M_C)
  GroupElement assigned_pub;    // P_C, received from the dealer
  std::vector<Share> opened;    // shares recovered from the ledger script
  std::optional<mpz_class> reconstructed;  // k_C once opened.size() >= t+1
};

struct VoterState {
  unsigned index = 0;           // 1..n
  std::vector<std::pair<std::string, Share>> shares;  // one per candidate
  EligibilityKey credential;    // voter-side view
  KeyPair funding_key;
  Outpoint funding;             // UTXO worth fee_x
  std::optional<std::string> voted_for;
  Bytes vote_ct;                // EncryptedVote bytes (for script verification)
  Bytes submission;             // eligibility-wrapped vote_ct
};

// Everything the dealer announces; contains only public key material.
struct PublishedBundle {
  mpz_class field_p;
  std::vector<std::string> roster;           // candidate tags
  std::vector<GroupElement> assigned_pubs;   // P_C, roster order
  std::vector<GroupElement> candidate_pubs;  // M_C, roster order
  GroupElement refund_pub;                   // S

  Bytes serialize() const;  // canonical bytes for leak scans
};

struct DealerSetup {
  DealerState dealer;
  std::vector<VoterState> voters;  // shares + credentials dealt, not yet funded
};

DealerSetup dealer_setup(const ElectionConfig& cfg, Rng& rng);

CandidateState candidate_setup(const std::string& tag, const GroupElement& assigned_pub,
                               Rng& rng);

PublishedBundle publish_bundle(const ElectionConfig& cfg, const DealerState& dealer,
                               const std::vector<CandidateState>& candidates);

// Composes the ballot from the matching share, encrypts to the chosen
// candidate's key, wraps with the voter's eligibility credential.
// Returns the wrapped submission; throws Err::DoubleVote on a second call.
Bytes voter_submit(VoterState& voter, const std::string& choice,
                   const PublishedBundle& published, Rng& rng);

struct SubmissionOutcome {
  std::vector<EncryptedVote> accepted;  // dealer's received (shuffled) order
  std::vector<Bytes> rejected;          // items failing the eligibility gate
  ShuffleOutcome shuffle;
};

// Shuffles the wrapped submissions through a Circle Shuffle session, then
// unwraps each against the dealer's credential list.
SubmissionOutcome run_submission_round(const std::vector<Bytes>& wrapped_items,
                                       const DealerState& dealer, Rng& rng,
                                       Transport* transport = nullptr);

// Invoked on the redeem script after every voter verified their vote but
// before signatures are collected; lets tests model a malicious dealer.
using TamperHook = std::function<void(Script& redeem)>;

struct VctBundle {
  Script redeem;
  Bytes p2sh;            // script digest the VCT pays to
  Transaction vct;       // accepted on return
  Outpoint vote_output;  // the n*x P2SH output
  Transaction rt;        // refund skeleton, outputs x to each voter
  Signature rt_dealer_sig;
};

// Builds the vote script and VCT, has every voter verify + sign, signs and
// distributes the RT, then broadcasts the VCT.  Throws
// Err::VoterVerificationFailure (nothing broadcast) when any voter's
// ciphertext is missing from the script they are asked to sign.
VctBundle build_and_sign_vct(const ElectionConfig& cfg, const DealerState& dealer,
                             std::vector<VoterState>& voters,
                             const std::vector<CandidateState>& candidates,
                             const std::vector<EncryptedVote>& order, Ledger& ledger,
                             const TamperHook& tamper = {});

// Completes the pre-signed RT with this voter's co-signature (hardened
// variant) so it can be broadcast once the locktime passes.
Transaction completed_refund(const VctBundle& bundle, const ElectionConfig& cfg,
                             const VoterState& co_signer);

struct ClaimResult {
  Transaction tx;
  SubmitResult submit;
};

// Trial-opens every metadata slot with s_C; with >= t+1 shares
// reconstructs k_C and submits the claim spend.  nullopt when the
// threshold is not reached.
std::optional<ClaimResult> candidate_claim(CandidateState& cand, Ledger& ledger,
                                           const VctBundle& bundle,
                                           const SharingConfig& sharing);

struct ElectionReport {
  std::string outcome;                // "winner" or "refund"
  std::optional<std::string> winner;  // candidate tag
  std::string transcript;             // JSON document
  Ledger ledger;
};

ElectionReport run_election(const ElectionConfig& cfg, const TamperHook& tamper = {});

}  // namespace sharvot
