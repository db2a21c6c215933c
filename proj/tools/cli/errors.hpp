#pragma once

#include "srlab/error.hpp"

namespace srlab::cli {

/// Inputs that parse but cannot be used: an empty image directory, a log
/// without validation rows.
class DataError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitIo = 3 };

}  // namespace srlab::cli
