#pragma once

#include <stdexcept>
#include <string>

namespace trusttoken {

/// Invalid numeric or structural parameters (PUF params, metric preconditions).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ill-formed system description: policy model, topology, wrapper registry, config files.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProvisioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an actor other than the controller (or the integrator before
/// the model is sealed) tries to rewrite an access matrix.
class MatrixTamperError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency violation inside the simulator, e.g. an authorization
/// outcome handed to the wrong wrapper.
class IntegrityFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace trusttoken
