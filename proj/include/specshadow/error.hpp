#pragma once

#include <stdexcept>
#include <string>

namespace specshadow {

/// Raised for malformed documents, violated preconditions and
/// arity/mode mismatches. The CLI maps it to exit code 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& message) {
  if (!cond) {
    throw InputError(message);
  }
}

}  // namespace specshadow
