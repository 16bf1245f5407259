#include "tmrc/errors.hpp"

namespace tmrc {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io:
      return 4;
    case ErrorKind::Config:
    case ErrorKind::Argument:
    case ErrorKind::Size:
    case ErrorKind::State:
      return 2;
    default:
      return 3;
  }
}

}  // namespace tmrc
