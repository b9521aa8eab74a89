#pragma once

#include <stdexcept>
#include <string>

namespace mfgplan {

// Raised on violated preconditions and malformed data. The message is meant to
// be shown to a user as-is.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfgplan
