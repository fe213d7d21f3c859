#pragma once

#include <stdexcept>
#include <string>

namespace sharvot {

enum class Err {
  InvalidConfig,
  ModulusMismatch,
  InsufficientShares,
  DuplicateShareX,
  InconsistentShares,
  AuthenticationFailure,
  KeyTooShort,
  WidthMismatch,
  MalformedPlaintext,
  SlotOverflow,
  MetadataOversize,
  ScriptTooLarge,
  ParseError,
  PhaseViolation,
  DecryptionFailure,
  EntryNotFound,
  ProtocolAbort,
  DoubleVote,
  MissingFunding,
  VoterVerificationFailure,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace sharvot
