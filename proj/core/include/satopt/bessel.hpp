#pragma once

namespace satopt {

/// Bessel function of the first kind J_n(u) for n in {1, 3} and u >= 0.
///
/// Ascending power series for u <= 8 (term truncation at 1e-18), Miller's
/// backward recurrence normalised by J0 + 2*sum(J_2k) = 1 above that. Absolute
/// error stays below 1e-13 on [0, 40].
///
/// Throws std::invalid_argument for an unsupported order or u < 0.
double bessel_j(int order, double u);

/// J_n(u) / u^n, finite at u = 0 (value 1 / (2^n n!)).
double bessel_j_scaled(int order, double u);

}  // namespace satopt
