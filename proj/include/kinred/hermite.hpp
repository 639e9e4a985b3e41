#pragma once

#include <vector>

namespace kinred {

/// Probabilists' Hermite polynomials He_0..He_K at w, orthogonal under the
/// standard normal density with int He_j He_k phi = k! delta_jk.
inline std::vector<double> hermite_he(double w, int max_degree) {
  std::vector<double> he(static_cast<std::size_t>(max_degree) + 2, 0.0);
  he[0] = 1.0;
  if (max_degree >= 1) he[1] = w;
  for (int k = 1; k < max_degree; ++k) {
    he[k + 1] = w * he[k] - k * he[k - 1];
  }
  he.resize(static_cast<std::size_t>(max_degree) + 1);
  return he;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace kinred
