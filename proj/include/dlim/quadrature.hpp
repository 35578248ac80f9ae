#pragma once

#include <cmath>
#include <concepts>

namespace dlim {

/// Composite 8-point Gauss-Legendre on [a, b], panels of length <= max_panel.
/// Intended for integrands smooth on the whole segment; callers split at
/// known kinks before integrating.
template <std::invocable<double> F>
double gauss8(F&& f, double a, double b, double max_panel = 1.0) {
  static constexpr double kNode[4] = {
      0.1834346424956498, 0.5255324099163290,
      0.7966664774136267, 0.9602898564975363};
  static constexpr double kWeight[4] = {
      0.3626837833783620, 0.3137066458778873,
      0.2223810344533745, 0.1012285362903763};
  if (!(b > a)) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      acc += kWeight[i] * (f(mid - half * kNode[i]) + f(mid + half * kNode[i]));
    }
    total += half * acc;
  }
  return total;
}

}  // namespace dlim
