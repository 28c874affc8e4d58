#pragma once

#include <stdexcept>
#include <string>

namespace bo {

enum class ErrorKind {
  InvalidSpectrum,
  InvalidParams,
  NoKStar,
  SingularRegularization,
  DegenerateS,
  ZeroSolution,
  TooFewTrials,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define BO_DEFINE_ERROR(Name)                                               \
  struct Name : Error {                                                     \
    explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {} \
  };

BO_DEFINE_ERROR(InvalidSpectrum)
BO_DEFINE_ERROR(InvalidParams)
BO_DEFINE_ERROR(NoKStar)
BO_DEFINE_ERROR(SingularRegularization)
BO_DEFINE_ERROR(DegenerateS)
BO_DEFINE_ERROR(ZeroSolution)
BO_DEFINE_ERROR(TooFewTrials)
BO_DEFINE_ERROR(ConfigError)

#undef BO_DEFINE_ERROR

// Config-level problems map to 2, numeric-domain problems to 3.
int exit_code_for(ErrorKind kind);

}  // namespace bo
