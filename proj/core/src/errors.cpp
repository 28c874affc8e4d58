#include "bo/errors.hpp"

namespace bo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NoKStar: return "NoKStar";
    case ErrorKind::SingularRegularization: return "SingularRegularization";
    case ErrorKind::DegenerateS: return "DegenerateS";
    case ErrorKind::ZeroSolution: return "ZeroSolution";
    case ErrorKind::TooFewTrials: return "TooFewTrials";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpectrum:
    case ErrorKind::InvalidParams:
    case ErrorKind::TooFewTrials:
    case ErrorKind::ConfigError:
      return 2;
    default:
      return 3;
  }
}

}  // namespace bo
