#include "limecert/detmath.hpp"

#include <cmath>
#include <stdexcept>

namespace limecert {

namespace {

// ln(2) split so that k * kLn2Hi is exact for |k| < 2^20
constexpr double kLn2Hi = 0x1.62e42fee00000p-1;
constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;
constexpr double kInvLn2 = 0x1.71547652b82fep+0;
constexpr double kSqrtHalf = 0x1.6a09e667f3bcdp-1;

}  // namespace

double det_exp(double x) {
  if (!(x == x)) throw std::domain_error("det_exp: nan input");
  if (x < -746.0) return 0.0;
  if (x > 709.7) throw std::range_error("det_exp: overflow");
  double kf = std::floor(x * kInvLn2 + 0.5);
  int k = static_cast<int>(kf);
  double r = (x - kf * kLn2Hi) - kf * kLn2Lo;
  // Taylor series at fixed length; |r| <= 0.3466 so the r^18 tail is ~1e-24
  constexpr double c[18] = {
      1.0,
      1.0,
      1.0 / 2,
      1.0 / 6,
      1.0 / 24,
      1.0 / 120,
      1.0 / 720,
      1.0 / 5040,
      1.0 / 40320,
      1.0 / 362880,
      1.0 / 3628800,
      1.0 / 39916800,
      1.0 / 479001600,
      1.0 / 6227020800.0,
      1.0 / 87178291200.0,
      1.0 / 1307674368000.0,
      1.0 / 20922789888000.0,
      1.0 / 355687428096000.0};
  double p = c[17];
  for (int i = 16; i >= 0; --i) p = p * r + c[i];
  return std::ldexp(p, k);
}

double det_log(double x) {
  if (!(x == x)) throw std::domain_error("det_log: nan input");
  if (x <= 0.0) throw std::domain_error("det_log: non-positive input");
  int e = 0;
  double m = std::frexp(x, &e);  // m in [0.5, 1)
  if (m < kSqrtHalf) {
    m *= 2.0;
    e -= 1;
  }
  double s = (m - 1.0) / (m + 1.0);
  double z = s * s;
  // atanh series: log(m) = 2s * sum z^j / (2j+1); |s| <= 0.1716
  constexpr double c[11] = {1.0,        1.0 / 3,  1.0 / 5,  1.0 / 7,
                            1.0 / 9,    1.0 / 11, 1.0 / 13, 1.0 / 15,
                            1.0 / 17,   1.0 / 19, 1.0 / 21};
  double p = c[10];
  for (int i = 9; i >= 0; --i) p = p * z + c[i];
  double logm = 2.0 * s * p;
  double ef = static_cast<double>(e);
  return (ef * kLn2Hi + logm) + ef * kLn2Lo;
}

double det_norm_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("det_norm_inv: p must be in (0, 1)");
  }
  // rational approximations with fixed coefficient sets; relative error
  // of the composite approximation is about 1.15e-9
  constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                           -2.759285104469687e+02, 1.383577518672690e+02,
                           -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                           -1.556989798598866e+02, 6.680131188771972e+01,
                           -1.328068155288572e+01};
  constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                           -2.400758277161838e+00, -2.549732539343734e+00,
                           4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  constexpr double p_high = 1.0 - p_low;

  if (p < p_low) {
    double q = std::sqrt(-2.0 * det_log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > p_high) {
    double q = std::sqrt(-2.0 * det_log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace limecert
