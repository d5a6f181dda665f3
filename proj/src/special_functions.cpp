#include "evr/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace evr::special {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Below this the asymptotic series is not used; recurrence shifts x up.
constexpr double kAsymptoticFloor = 12.0;

}  // namespace

double lgamma(double x) {
  if (x < 0.5) {
    // Gamma(x) = Gamma(x + 1) / x
    return lgamma(x + 1.0) - std::log(x);
  }
  const double z = x - 1.0;
  double a = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
    a += kLanczosCoef[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(a);
}

double digamma(double x) {
  double shift = 0.0;
  while (x < kAsymptoticFloor) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  double shift = 0.0;
  while (x < kAsymptoticFloor) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
  const double series =
      inv * (1.0 + inv * (0.5 + inv * (1.0 / 6 -
                                       inv2 * (1.0 / 30 -
                                               inv2 * (1.0 / 42 -
                                                       inv2 * (1.0 / 30 - inv2 * (5.0 / 66)))))));
  return shift + series;
}

}  // namespace evr::special
