#pragma once

// Small statistics helpers shared by the experiment drivers and the tests.

#include <cmath>
#include <cstdint>
#include <utility>

namespace anonsteg {

// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(uint64_t successes, uint64_t trials,
                                                 double z = 1.959963985) {
  if (trials == 0) return {0.0, 1.0};
  double n = double(trials);
  double p = double(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {center - half, center + half};
}

inline double standard_error(double p, uint64_t trials) {
  return trials ? std::sqrt(p * (1.0 - p) / double(trials)) : 1.0;
}

// Upper chi-square quantile via the Wilson-Hilferty cube approximation;
// adequate for the goodness-of-fit gates used here.
inline double chi_square_quantile(double df, double prob) {
  // inverse normal via Acklam's rational approximation
  auto inv_norm = [](double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    double q, r;
    if (p < 0.02425) {
      q = std::sqrt(-2 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > 1 - 0.02425) {
      q = std::sqrt(-2 * std::log(1 - p));
      return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  };
  double z = inv_norm(prob);
  double t = 2.0 / (9.0 * df);
  double v = 1.0 - t + z * std::sqrt(t);
  return df * v * v * v;
}

}  // namespace anonsteg
