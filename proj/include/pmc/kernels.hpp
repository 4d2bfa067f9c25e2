#pragma once

#include <cmath>
#include <type_traits>

#include "pmc/errors.hpp"
#include "pmc/quadrature.hpp"

namespace pmc {

/// Exact value of the time kernel  int_0^T exp(-l t) exp(-lp t) dt
/// = (1 - exp(-(l+lp) T)) / (l + lp), evaluated without overflow or
/// cancellation for any l + lp > 0.
template <typename Scalar = double>
Scalar exp_time_inner(Scalar l, Scalar lp, Scalar T) {
  const Scalar s = l + lp;
  if (!(s > Scalar(0)) || !(T > Scalar(0)))
    throw contract_error("exp_time_inner: requires l + lp > 0 and T > 0");
  if constexpr (std::is_same_v<Scalar, long double>)
    return -std::expm1l(-s * T) / s;
  else
    return -std::expm1(-s * T) / s;
}

/// Closed form of  int_a^b sin(m x) sin(n x) dx  with the m == n branch
/// handled separately.
template <typename Scalar = double>
Scalar sine_overlap(int m, int n, Scalar a, Scalar b) {
  if (m < 1 || n < 1) throw contract_error("sine_overlap: indices must be >= 1");
  if (!(a >= Scalar(0)) || !(a < b) || !(b <= Scalar(pi) + Scalar(1e-12)))
    throw contract_error("sine_overlap: requires 0 <= a < b <= pi");
  const auto S = [](Scalar x) { return std::sin(x); };
  if (m == n) {
    const Scalar w = Scalar(2 * m);
    return (b - a) / Scalar(2) - (S(w * b) - S(w * a)) / (Scalar(2) * w);
  }
  const Scalar d = Scalar(m - n), s = Scalar(m + n);
  return (S(d * b) - S(d * a)) / (Scalar(2) * d) -
         (S(s * b) - S(s * a)) / (Scalar(2) * s);
}

} // namespace pmc
