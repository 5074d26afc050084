#pragma once

#include <stdexcept>
#include <string>

namespace tamelab {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define TAMELAB_ERROR(Name)                                             \
  struct Name : Error {                                                 \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  }

TAMELAB_ERROR(DisconnectedDomain);
TAMELAB_ERROR(EmptyDomain);
TAMELAB_ERROR(NonPositiveWeight);
TAMELAB_ERROR(NegativeTime);
TAMELAB_ERROR(SolverDivergence);
TAMELAB_ERROR(SingularSystem);
TAMELAB_ERROR(IterationDivergence);
TAMELAB_ERROR(RhoOutOfRange);
TAMELAB_ERROR(NonPositiveTestFunction);
TAMELAB_ERROR(StepTooLarge);
TAMELAB_ERROR(NoBoundary);
TAMELAB_ERROR(UnknownScenario);
TAMELAB_ERROR(ConfigParse);

#undef TAMELAB_ERROR

}  // namespace tamelab
