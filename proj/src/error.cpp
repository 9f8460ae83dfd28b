#include "dtsolve/error.hpp"

namespace dtsolve {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::CptRowSum: return "E_CPT_ROW_SUM";
    case Errc::Cycle: return "E_CYCLE";
    case Errc::MissingRow: return "E_MISSING_ROW";
    case Errc::UtilityIncomplete: return "E_UTILITY_INCOMPLETE";
    case Errc::UnknownVariable: return "E_UNKNOWN_VARIABLE";
    case Errc::ZeroMarginal: return "E_ZERO_MARGINAL";
    case Errc::OrderViolatesInformation: return "E_ORDER_VIOLATES_INFORMATION";
    case Errc::MissingProbability: return "E_MISSING_PROBABILITY";
    case Errc::MissingPathProbability: return "E_MISSING_PATH_PROBABILITY";
    case Errc::SetNotReady: return "E_SET_NOT_READY";
    case Errc::Syntax: return "E_SYNTAX";
    case Errc::ProbabilityRange: return "E_PROBABILITY_RANGE";
    case Errc::BadFrame: return "E_BAD_FRAME";
    case Errc::DuplicateName: return "E_DUPLICATE_NAME";
  }
  return "E_UNKNOWN";
}

namespace {

std::string format_message(Errc code, const std::string& message, SourcePos pos) {
  std::string text = errc_name(code);
  if (pos.line > 0) {
    text += " at line " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
  }
  text += ": " + message;
  return text;
}

}  // namespace

Error::Error(Errc code, const std::string& message, SourcePos pos)
    : std::runtime_error(format_message(code, message, pos)), code_(code), pos_(pos) {}

void fail(Errc code, const std::string& message, SourcePos pos) {
  throw Error(code, message, pos);
}

}  // namespace dtsolve
