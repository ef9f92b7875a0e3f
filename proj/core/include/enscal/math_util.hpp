#ifndef ENSCAL_MATH_UTIL_HPP_
#define ENSCAL_MATH_UTIL_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

namespace enscal {

inline constexpr double kInvSqrtPi = 0.5641895835477562869;   // 1/sqrt(pi)
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730950488;

inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement, accurate to ~1e-15).
double norm_quantile(double p);

// Linear-interpolation empirical quantile of a sample at level p in (0,1).
// The sample is copied and sorted internally.
double sample_quantile(std::vector<double> sample, double p);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased, divisor n-1

// Upper tail of the Kolmogorov distribution: P(sqrt(n)*D_n > t) in the large-n
// limit. Used for one-sample KS p-values.
double kolmogorov_p_value(double t);

}  // namespace enscal

#endif  // ENSCAL_MATH_UTIL_HPP_
