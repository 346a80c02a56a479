#pragma once

#include <stdexcept>
#include <string>

namespace qsvm {

// Exit codes double as error identities; the CLI maps them 1:1 to process
// status and prints a single greppable "error: <name>: <detail>" line.
enum class Errc {
  Generic = 1,
  MissingFile = 2,
  EmptyCorpus = 3,
  FormatError = 4,
  UnknownClass = 5,
  SingleClass = 6,
  MissingStats = 7,
  InvalidStats = 8,
  ModelParse = 9,
  EmptyEvaluation = 10,
  NonFiniteValue = 11,
  FinalizedRegistry = 12,
  EmptyStatsPass = 13,
  DimensionMismatch = 14,
  UnknownSite = 15,
  InvalidArgument = 16,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace qsvm
