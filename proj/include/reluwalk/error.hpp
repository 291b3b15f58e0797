#pragma once

#include <stdexcept>

namespace reluwalk {

/// Caller handed us something malformed: wrong dimensions, bad config, bad file.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace reluwalk
