#include "satopt/bessel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace satopt {

namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kTermCutoff = 1e-18;

void check_args(int order, double u) {
  if (order != 1 && order != 3) {
    throw std::invalid_argument("bessel_j: unsupported order " + std::to_string(order));
  }
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw std::invalid_argument("bessel_j: argument must be finite and >= 0");
  }
}

// sum_m (-1)^m (u/2)^(2m) / (2^n m! (m+n)!), i.e. J_n(u) / u^n.
double scaled_series(int order, double u) {
  const double q = 0.25 * u * u;
  double term = 1.0;
  for (int k = 1; k <= order; ++k) term /= 2.0 * k;
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (static_cast<double>(m) * (m + order));
    sum += term;
    if (std::abs(term) < kTermCutoff) break;
  }
  return sum;
}

double miller(int order, double u) {
  int start = static_cast<int>(1.5 * u) + 40;
  if (start % 2 != 0) ++start;

  const double two_over_u = 2.0 / u;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k, arbitrary seed
  double even_sum = 0.0;
  double wanted = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = k * two_over_u * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      even_sum *= 1e-250;
      wanted *= 1e-250;
    }
    if (k - 1 == order) wanted = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) even_sum += cur;
  }
  // cur now holds J_0 (unnormalised).
  const double norm = cur + 2.0 * even_sum;
  return wanted / norm;
}

}  // namespace

double bessel_j(int order, double u) {
  check_args(order, u);
  if (u == 0.0) return 0.0;
  if (u <= kSeriesLimit) return scaled_series(order, u) * std::pow(u, order);
  return miller(order, u);
}

double bessel_j_scaled(int order, double u) {
  check_args(order, u);
  if (u <= kSeriesLimit) return scaled_series(order, u);
  return miller(order, u) / std::pow(u, order);
}

}  // namespace satopt
