#ifndef ENSCAL_OPTIM_HPP_
#define ENSCAL_OPTIM_HPP_

#include <functional>
#include <vector>

namespace enscal {

struct NelderMeadOptions {
  double f_tolerance = 1e-8;   // stop when the simplex function spread falls below this
  int max_iterations = 5000;
  double initial_step = 0.1;   // relative simplex edge length
};

struct NelderMeadResult {
  std::vector<double> x;
  double f_min = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free downhill simplex minimization.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace enscal

#endif  // ENSCAL_OPTIM_HPP_
