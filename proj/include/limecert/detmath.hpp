#pragma once

namespace limecert {

// Reproducible replacements for exp, log, and the standard normal inverse
// CDF. libm implementations of these differ across platforms and versions,
// which would make independently generated lookup tables disagree. These
// versions use only IEEE-754 basic operations (+, -, *, /, sqrt) plus
// floor/frexp/ldexp in a fixed evaluation order, so every conforming
// platform computes bit-identical doubles.

// Relative error below 1e-14 on [-746, 710]; exact 1.0 at x = 0.
double det_exp(double x);

// Relative error below 1e-14 for finite positive x.
double det_log(double x);

// Inverse CDF of the standard normal distribution, relative error about
// 1.2e-9 (rational approximation, central region plus both tails).
double det_norm_inv(double p);

}  // namespace limecert
