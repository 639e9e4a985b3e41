#pragma once

#include <stdexcept>
#include <string>

namespace kinred {

enum class ErrorKind {
  Parameter,
  Realizability,
  Inversion,
  DegenerateChart,
  Configuration,
  Step,
  BlowUp,
  Io,
};

/// Base for every error the library raises; `kind()` lets callers map
/// failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define KINRED_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

KINRED_DEFINE_ERROR(ParameterError, Parameter)
KINRED_DEFINE_ERROR(RealizabilityError, Realizability)
KINRED_DEFINE_ERROR(InversionError, Inversion)
KINRED_DEFINE_ERROR(DegenerateChartError, DegenerateChart)
KINRED_DEFINE_ERROR(ConfigurationError, Configuration)
KINRED_DEFINE_ERROR(StepError, Step)
KINRED_DEFINE_ERROR(BlowUpError, BlowUp)
KINRED_DEFINE_ERROR(IoError, Io)

#undef KINRED_DEFINE_ERROR

}  // namespace kinred
