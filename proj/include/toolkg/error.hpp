#pragma once

#include <stdexcept>
#include <string>

namespace toolkg {

enum class ErrorKind {
  Io,
  Parse,
  Validation,
  Ontology,
  SelfLoop,
  NotFound,
  Version,
  Canonicalization,
  Provider,
  ProviderContract,
  GeneratorFormat,
  CacheMiss,
  Config,
  IncompatibleClass,
  Report,
  Contract,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library. The module tag is what the CLI
// prints in front of the message ("catalog: ...").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace toolkg
