#pragma once

#include <stdexcept>
#include <string>

namespace microsage {

// One error code per failure mode surfaced by the library. The CLI maps any
// thrown Error to a nonzero exit status with a one-line diagnostic.
enum class Errc {
  MalformedRow,
  DuplicatePair,
  UnknownSpecies,
  UnknownCondition,
  AsymmetricPhylo,
  NegativeYield,
  DegenerateSplit,
  InvalidConfig,
  DegenerateData,
  NonFinite,
  DimensionMismatch,
  TooFewRows,
  ShapeMismatch,
  EmptyMask,
  MissingCache,
  NonFiniteLoss,
  EmptyGraph,
  EmptyModel,
  LabelOutOfRange,
  EmptyMatrix,
  IoFailure,
  ConfigParse,
  MissingInput,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace microsage
