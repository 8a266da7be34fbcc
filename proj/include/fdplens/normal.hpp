#pragma once
// Standard normal distribution functions.

namespace fdplens::normal {

double cdf(double x);
// Upper tail 1 - cdf(x), accurate far into the tail.
double sf(double x);
// Inverse of cdf on (0, 1); -inf at 0 and +inf at 1. Wichura's AS 241 (PPND16).
double quantile(double p);
// Inverse of sf, computed as -quantile(p) to keep relative accuracy for tiny p.
double isf(double p);

} // namespace fdplens::normal
