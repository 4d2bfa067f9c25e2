#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "pmc/errors.hpp"

namespace pmc {

inline constexpr double pi = std::numbers::pi_v<double>;

/// Uniform grid of n points over [0, pi], endpoints included.
inline Eigen::VectorXd uniform_grid(int n) {
  if (n < 4) throw contract_error("uniform_grid: need at least 4 points");
  return Eigen::VectorXd::LinSpaced(n, 0.0, pi);
}

inline double grid_step(int n) { return pi / static_cast<double>(n - 1); }

/// Composite trapezoid of sampled values over the full grid.
inline double trapezoid(const Eigen::VectorXd& v, double h) {
  const Eigen::Index n = v.size();
  if (n < 2) throw contract_error("trapezoid: need at least 2 samples");
  return h * (v.sum() - 0.5 * (v(0) + v(n - 1)));
}

/// Trapezoid inner product of two grid functions on [0, pi].
inline double grid_inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                         double h) {
  if (f.size() != g.size())
    throw contract_error("grid_inner: size mismatch");
  return trapezoid((f.array() * g.array()).matrix(), h);
}

namespace detail {
// Integral of the cubic Lagrange basis L_q (nodes u = 0,1,2,3) over [0, u].
inline double lagrange3_antiderivative(int q, double u) {
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
  switch (q) {
    case 0: return -(u4 / 4.0 - 2.0 * u3 + 5.5 * u2 - 6.0 * u) / 6.0;
    case 1: return (u4 / 4.0 - 5.0 * u3 / 3.0 + 3.0 * u2) / 2.0;
    case 2: return -(u4 / 4.0 - 4.0 * u3 / 3.0 + 1.5 * u2) / 2.0;
    default: return (u4 / 4.0 - u3 + u2) / 6.0;
  }
}
} // namespace detail

/// Integral over the window (a, b) of a function sampled on the shared
/// uniform grid of n points over [0, pi]. Cell-wise cubic interpolation,
/// partial end cells clipped exactly; O(h^4) for smooth integrands.
inline double window_integral(const Eigen::VectorXd& v, double a, double b) {
  const Eigen::Index n = v.size();
  if (n < 4) throw contract_error("window_integral: need at least 4 samples");
  if (!(a < b)) throw contract_error("window_integral: degenerate window");
  if (a < -1e-12 || b > pi + 1e-12)
    throw contract_error("window_integral: window outside [0, pi]");
  a = std::max(a, 0.0);
  b = std::min(b, pi);
  const double h = grid_step(static_cast<int>(n));

  double total = 0.0;
  const auto cell_of = [&](double x) {
    return std::min<Eigen::Index>(n - 2, std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor(x / h))));
  };
  for (Eigen::Index c = cell_of(a); c <= cell_of(b - 1e-300); ++c) {
    const double lo = std::max(a, c * h);
    const double hi = std::min(b, (c + 1) * h);
    if (hi <= lo) continue;
    const Eigen::Index s = std::min<Eigen::Index>(std::max<Eigen::Index>(c - 1, 0), n - 4);
    const double ulo = (lo - s * h) / h;
    const double uhi = (hi - s * h) / h;
    for (int q = 0; q < 4; ++q) {
      total += v(s + q) * h *
               (detail::lagrange3_antiderivative(q, uhi) -
                detail::lagrange3_antiderivative(q, ulo));
    }
  }
  return total;
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed once per order.
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  explicit GaussLegendre(int order) : nodes(order), weights(order) {
    for (int i = 0; i < order; ++i) {
      // Newton iteration from the Chebyshev estimate.
      double x = std::cos(pi * (i + 0.75) / (order + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes(i) = x;
      weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  double integrate(const std::function<double(double)>& f, double a,
                   double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i)
      acc += weights(i) * f(mid + half * nodes(i));
    return acc * half;
  }
};

inline const GaussLegendre& gauss_legendre(int order) {
  static const GaussLegendre g8(8), g16(16);
  if (order == 8) return g8;
  if (order == 16) return g16;
  thread_local std::vector<std::pair<int, GaussLegendre>> cache;
  for (auto& [o, g] : cache)
    if (o == order) return g;
  cache.emplace_back(order, GaussLegendre(order));
  return cache.back().second;
}

/// Integral of f over (0, T] with subintervals geometrically graded toward
/// t = 0; meant for integrands with weights like exp(-c / t^b) that vanish
/// at the origin. The uncovered sliver (0, T*1e-12) is dropped.
inline double graded_time_integral(const std::function<double(double)>& f,
                                   double T, int panels = 40,
                                   int gl_order = 16) {
  if (T <= 0.0) throw contract_error("graded_time_integral: T must be > 0");
  const auto& gl = gauss_legendre(gl_order);
  const double ratio = std::pow(1e-12, 1.0 / panels);
  double acc = 0.0;
  double hi = T;
  for (int i = 0; i < panels; ++i) {
    const double lo = hi * ratio;
    acc += gl.integrate(f, lo, hi);
    hi = lo;
  }
  return acc;
}

/// Slope, intercept and R^2 of the least-squares line through (x, y).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw contract_error("fit_line: need matching inputs of size >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  LineFit fit;
  if (sxx == 0.0) {
    fit.slope = 0.0;
    fit.intercept = my;
    fit.r2 = 0.0;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double syy = (y.array() - my).square().sum();
  const Eigen::ArrayXd res = y.array() - (fit.slope * x.array() + fit.intercept);
  fit.r2 = syy > 0.0 ? 1.0 - res.square().sum() / syy : 1.0;
  (void)n;
  return fit;
}

} // namespace pmc
