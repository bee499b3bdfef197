#pragma once

#include <stdexcept>

namespace eopt {

/// A numerical failure: non-finite data or a decomposition that did not
/// converge. Argument and domain problems use the standard exceptions.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eopt
