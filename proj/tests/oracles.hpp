#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// library's computation paths: quadrature instead of closed forms, bisection
// instead of QL iterations, time-grid least squares instead of Gram algebra.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Depth 18 caps the subdivision: integrands assembled from large
// cancelling terms carry evaluation noise that the tolerance-halving
// cascade can never satisfy, while 2^18 panels already put the Simpson
// truncation error far below any tolerance used here.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 18);
}

// Smallest K eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence
// bisection (constant off-diagonal).
inline std::vector<double> tridiag_eigs_bisect(const Eigen::VectorXd& diag,
                                               double off, int K) {
  const int n = static_cast<int>(diag.size());
  const double off2 = off * off;
  const auto count_below = [&](double x) {
    // Number of eigenvalues < x via the Sturm sequence of leading minors.
    int count = 0;
    double d = diag(0) - x;
    if (d < 0) ++count;
    for (int i = 1; i < n; ++i) {
      d = diag(i) - x - off2 / (d == 0.0 ? 1e-300 : d);
      if (d < 0) ++count;
    }
    return count;
  };
  double lo = diag.minCoeff() - 2.0 * std::abs(off);
  double hi = diag.maxCoeff() + 2.0 * std::abs(off);
  std::vector<double> out;
  for (int k = 1; k <= K; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
      const double m = 0.5 * (a + b);
      if (count_below(m) >= k)
        b = m;
      else
        a = m;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

// Largest eigenvalue of G^{-1} (= 1/lambda_min(G)) by inverse power
// iteration in extended precision, seeded deterministically.
inline long double inverse_power_max(
    const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>& G,
    unsigned seed, int iterations = 600) {
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Eigen::Index n = G.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VecL v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unit(rng);
  v /= v.norm();
  const auto lu = G.fullPivLu();
  long double rayleigh = 0.0L;
  for (int it = 0; it < iterations; ++it) {
    VecL w = lu.solve(v);
    rayleigh = v.dot(w); // Rayleigh quotient of G^{-1} at unit v
    v = w / w.norm();
  }
  return rayleigh;
}

// Least-norm biorthogonal duals on a fine time grid: minimizes the discrete
// L2 norm subject to <q, e_i> = delta by solving the constraint normal
// equations with a trapezoid inner product.
struct TimeGridDuals {
  Eigen::VectorXd t;
  Eigen::MatrixXd values; // column i: dual to mode i on the grid
  Eigen::VectorXd sq_norms;
};

inline TimeGridDuals least_norm_duals(const Eigen::VectorXd& lambdas, double T,
                                      int grid = 20000) {
  const Eigen::Index n = lambdas.size();
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(grid, 0.0, T);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(grid, T / (grid - 1));
  w(0) *= 0.5;
  w(grid - 1) *= 0.5;
  Eigen::MatrixXd E(grid, n);
  for (Eigen::Index i = 0; i < n; ++i)
    E.col(i) = (-lambdas(i) * t.array()).exp();
  const Eigen::MatrixXd G = E.transpose() * w.asDiagonal() * E;
  const Eigen::MatrixXd C = G.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  TimeGridDuals out;
  out.t = t;
  out.values = E * C;
  out.sq_norms = C.diagonal();
  return out;
}

// Random element of the biorthogonal complement: w = sum d_l E_l over an
// enlarged family with B d = 0, where B are the cross inner products with
// the retained family. Returns the primal-coefficient vector d.
inline Eigen::VectorXd biortho_complement_direction(
    const Eigen::MatrixXd& cross_gram, std::mt19937_64& rng) {
  const Eigen::Index rows = cross_gram.rows(); // retained
  const Eigen::Index cols = cross_gram.cols(); // enlarged
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cross_gram);
  const Eigen::MatrixXd null_basis = lu.kernel();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd mix(null_basis.cols());
  for (Eigen::Index i = 0; i < mix.size(); ++i) mix(i) = unit(rng);
  Eigen::VectorXd d = null_basis * mix;
  (void)rows;
  (void)cols;
  return d;
}

} // namespace oracle
