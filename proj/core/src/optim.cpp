#include "enscal/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace enscal {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const size_t n = x0.size();
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (size_t i = 0; i < n; ++i) {
    double step = opts.initial_step * std::max(1.0, std::abs(x0[i]));
    simplex[i + 1][i] += step;
  }
  std::vector<double> fv(n + 1);
  for (size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  std::vector<size_t> order(n + 1);
  NelderMeadResult res;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
    const size_t best = order[0], worst = order[n], second_worst = order[n - 1];

    if (std::abs(fv[worst] - fv[best]) <= opts.f_tolerance * (1.0 + std::abs(fv[best]))) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= double(n);

    auto affine = [&](double t) {
      std::vector<double> p(n);
      for (size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (centroid[j] - simplex[worst][j]);
      return p;
    };

    auto reflected = affine(alpha);
    double fr = f(reflected);
    if (fr < fv[best]) {
      auto expanded = affine(gamma);
      double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        fv[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      simplex[worst] = std::move(reflected);
      fv[worst] = fr;
    } else {
      auto contracted = affine(fr < fv[worst] ? rho : -rho);
      double fc = f(contracted);
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = std::move(contracted);
        fv[worst] = fc;
      } else {
        for (size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (size_t j = 0; j < n; ++j) {
            simplex[i][j] = simplex[best][j] + shrink * (simplex[i][j] - simplex[best][j]);
          }
          fv[i] = f(simplex[i]);
        }
      }
    }
  }

  size_t best = size_t(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.f_min = fv[best];
  res.iterations = iter;
  return res;
}

}  // namespace enscal
