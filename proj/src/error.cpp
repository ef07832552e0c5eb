#include "degen/error.hpp"

namespace degen {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::Model: return "model error";
    case ErrorKind::Certification: return "certification failure";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Internal: return "internal consistency error";
  }
  return "unknown error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace degen
