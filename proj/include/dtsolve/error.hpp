#ifndef DTSOLVE_ERROR_HPP
#define DTSOLVE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dtsolve {

enum class Errc {
  CptRowSum,
  Cycle,
  MissingRow,
  UtilityIncomplete,
  UnknownVariable,
  ZeroMarginal,
  OrderViolatesInformation,
  MissingProbability,
  MissingPathProbability,
  SetNotReady,
  Syntax,
  ProbabilityRange,
  BadFrame,
  DuplicateName,
};

const char* errc_name(Errc code);

// 1-based source location; line 0 means "no position available".
struct SourcePos {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, SourcePos pos = {});

  Errc code() const { return code_; }
  SourcePos pos() const { return pos_; }

 private:
  Errc code_;
  SourcePos pos_;
};

[[noreturn]] void fail(Errc code, const std::string& message, SourcePos pos = {});

}  // namespace dtsolve

#endif  // DTSOLVE_ERROR_HPP
