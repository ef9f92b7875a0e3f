#ifndef ENSCAL_ERRORS_HPP_
#define ENSCAL_ERRORS_HPP_

#include <stdexcept>

namespace enscal {

// Raised by the model fitters and feature builders: too few cases,
// degenerate regressors, diverged optimization.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace enscal

#endif  // ENSCAL_ERRORS_HPP_
