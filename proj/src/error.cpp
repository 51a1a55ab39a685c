#include "toolkg/error.hpp"

namespace toolkg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Ontology: return "ontology";
    case ErrorKind::SelfLoop: return "self_loop";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Version: return "version";
    case ErrorKind::Canonicalization: return "canonicalization";
    case ErrorKind::Provider: return "provider";
    case ErrorKind::ProviderContract: return "provider_contract";
    case ErrorKind::GeneratorFormat: return "generator_format";
    case ErrorKind::CacheMiss: return "cache_miss";
    case ErrorKind::Config: return "config";
    case ErrorKind::IncompatibleClass: return "incompatible_class";
    case ErrorKind::Report: return "report";
    case ErrorKind::Contract: return "contract";
  }
  return "unknown";
}

}  // namespace toolkg
