#pragma once

namespace evr::special {

// Log-gamma for x > 0 (Lanczos, g = 7, 9 terms, with reflection-free
// recurrence for x < 0.5). Relative error is below 1e-13 for x >= 0.5.
double lgamma(double x);

double digamma(double x);

double trigamma(double x);

}  // namespace evr::special
