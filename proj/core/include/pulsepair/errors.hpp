#pragma once

#include <stdexcept>

namespace pulsepair {

// Error taxonomy mirrored by the CLI exit codes: usage=1, data=2, io=3.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pulsepair
