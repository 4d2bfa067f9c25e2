#include "pmc/spectral1d.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pmc {

namespace {

double stencil_derivative_at_0(const Eigen::VectorXd& v, double h) {
  return (-25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3) - 3.0 * v(4)) /
         (12.0 * h);
}

double cubic_interpolate(const Eigen::VectorXd& v, double x) {
  const Eigen::Index n = v.size();
  const double h = grid_step(static_cast<int>(n));
  Eigen::Index c = static_cast<Eigen::Index>(std::floor(x / h));
  c = std::min<Eigen::Index>(n - 2, std::max<Eigen::Index>(0, c));
  const Eigen::Index s = std::min<Eigen::Index>(std::max<Eigen::Index>(c - 1, 0), n - 4);
  const double u = (x - s * h) / h;
  const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  return v(s) * l0 + v(s + 1) * l1 + v(s + 2) * l2 + v(s + 3) * l3;
}

// First K eigenvalues of the interior finite-difference matrix of
// -u'' + q u at the given grid resolution (n points incl. endpoints).
Eigen::VectorXd fd_eigenvalues(const Potential& q, int K, int n) {
  const int ni = n - 2;
  const double h = grid_step(n);
  Eigen::VectorXd diag(ni);
  for (int i = 0; i < ni; ++i)
    diag(i) = 2.0 / (h * h) + q.value((i + 1) * h);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(ni - 1, -1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numeric_error("sturm_liouville_eigs: tridiagonal eigensolve failed");
  return solver.eigenvalues().head(K);
}

// Tridiagonal solve (A - sigma I) x = b with the Wilkinson small-pivot
// guard; A has constant off-diagonal `off` and diagonal `diag`.
Eigen::VectorXd shifted_tridiag_solve(const Eigen::VectorXd& diag, double off,
                                      double sigma, Eigen::VectorXd b) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd d(n), c(n);
  const double tiny = 1e-300;
  d(0) = diag(0) - sigma;
  if (std::abs(d(0)) < tiny) d(0) = tiny;
  c(0) = off / d(0);
  b(0) /= d(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    d(i) = diag(i) - sigma - off * c(i - 1);
    if (std::abs(d(i)) < tiny) d(i) = tiny;
    if (i < n - 1) c(i) = off / d(i);
    b(i) = (b(i) - off * b(i - 1)) / d(i);
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) b(i) -= c(i) * b(i + 1);
  return b;
}

void apply_normalization(Eigenpair1D& eig, Normalization normalization,
                         const Window& window, double h) {
  double d0 = stencil_derivative_at_0(eig.samples, h);
  if (normalization == Normalization::boundary) {
    if (std::abs(d0) < 1e-300)
      throw numeric_error("normalization: vanishing derivative at 0");
    eig.samples /= d0;
    eig.derivative_at_0 = 1.0;
  } else {
    window.validate();
    const Eigen::VectorXd sq = eig.samples.array().square();
    const double mass = window_integral(sq, window.a, window.b);
    if (!(mass > 0.0))
      throw numeric_error("normalization: vanishing window norm");
    const double sign = d0 >= 0.0 ? 1.0 : -1.0;
    eig.samples *= sign / std::sqrt(mass);
    eig.derivative_at_0 = stencil_derivative_at_0(eig.samples, h);
  }
  eig.normalization = normalization;
  eig.window = window;
}

} // namespace

Potential Potential::zero(int grid) {
  Potential q;
  q.kind = Kind::zero;
  q.samples = Eigen::VectorXd::Zero(grid);
  return q;
}

Potential Potential::constant(double c, int grid) {
  Potential q;
  q.kind = Kind::constant;
  q.c = c;
  q.samples = Eigen::VectorXd::Constant(grid, c);
  return q;
}

Potential Potential::cos2(int grid) {
  Potential q;
  q.kind = Kind::cos2;
  q.samples = (2.0 * uniform_grid(grid).array()).cos();
  return q;
}

Potential Potential::from_samples(Eigen::VectorXd samples) {
  if (samples.size() < 4)
    throw contract_error("potential: need at least 4 samples");
  if (!samples.allFinite())
    throw contract_error("potential: samples must be finite");
  Potential q;
  q.kind = Kind::sampled;
  q.samples = std::move(samples);
  return q;
}

Potential Potential::named(const std::string& name, int grid) {
  if (name == "zero") return zero(grid);
  if (name == "cos2") return cos2(grid);
  if (name.rfind("const:", 0) == 0)
    return constant(std::stod(name.substr(6)), grid);
  throw contract_error("potential: unknown name '" + name + "'");
}

double Potential::value(double x) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: return c;
    case Kind::cos2: return std::cos(2.0 * x);
    case Kind::sampled: return cubic_interpolate(samples, x);
  }
  return 0.0;
}

double Potential::mean() const {
  return trapezoid(samples, grid_step(static_cast<int>(samples.size()))) / pi;
}

Eigenpair1D dirichlet_laplacian_mode(int k, Normalization normalization,
                                     Window window, int grid_size) {
  if (k < 1) throw contract_error("dirichlet_laplacian_mode: k must be >= 1");
  const Eigen::VectorXd x = uniform_grid(grid_size);
  Eigenpair1D eig;
  eig.k = k;
  eig.nu = static_cast<double>(k) * static_cast<double>(k);
  eig.grid_size = grid_size;
  eig.samples = (static_cast<double>(k) * x.array()).sin() / k;
  apply_normalization(eig, normalization, window, grid_step(grid_size));
  return eig;
}

SturmLiouvilleResult sturm_liouville_eigs(const Potential& q, int K,
                                          int grid_size,
                                          Normalization normalization,
                                          Window window) {
  if (K < 1) throw contract_error("sturm_liouville_eigs: K must be >= 1");
  if (grid_size < 64)
    throw contract_error("sturm_liouville_eigs: grid_size must be >= 64");
  if (K > grid_size / 4)
    throw contract_error("sturm_liouville_eigs: grid too coarse for requested "
                         "K (need K <= grid_size/4)");

  const int n_fine = 2 * grid_size - 1;
  const Eigen::VectorXd coarse = fd_eigenvalues(q, K, grid_size);
  const Eigen::VectorXd fine = fd_eigenvalues(q, K, n_fine);
  const Eigen::VectorXd extrapolated = (4.0 * fine - coarse) / 3.0;

  SturmLiouvilleResult result;
  const double nu_min = extrapolated(0);
  result.shift = nu_min > 0.0 ? 0.0 : 1.0 - nu_min;

  const int ni = grid_size - 2;
  const double h = grid_step(grid_size);
  const double off = -1.0 / (h * h);
  Eigen::VectorXd diag(ni);
  for (int i = 0; i < ni; ++i)
    diag(i) = 2.0 / (h * h) + q.value((i + 1) * h);

  result.eigs.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    // Inverse iteration seeded with the Laplacian mode of the same index.
    Eigen::VectorXd v(ni);
    for (int i = 0; i < ni; ++i) v(i) = std::sin(k * (i + 1) * h);
    v.normalize();
    const double sigma = coarse(k - 1);
    for (int it = 0; it < 3; ++it) {
      v = shifted_tridiag_solve(diag, off, sigma, v);
      v.normalize();
    }
    Eigen::VectorXd resid = (diag.array() - sigma).matrix().asDiagonal() * v;
    resid.head(ni - 1) += off * v.tail(ni - 1);
    resid.tail(ni - 1) += off * v.head(ni - 1);
    if (resid.norm() > 1e-7 * (2.0 / (h * h)))
      throw numeric_error("sturm_liouville_eigs: inverse iteration residual " +
                          std::to_string(resid.norm()));

    Eigenpair1D eig;
    eig.k = k;
    eig.nu = extrapolated(k - 1) + result.shift;
    eig.grid_size = grid_size;
    eig.samples = Eigen::VectorXd::Zero(grid_size);
    eig.samples.segment(1, ni) = v;
    apply_normalization(eig, normalization, window, h);
    result.eigs.push_back(std::move(eig));
  }
  for (std::size_t i = 1; i < result.eigs.size(); ++i)
    if (!(result.eigs[i].nu > result.eigs[i - 1].nu))
      throw numeric_error("sturm_liouville_eigs: eigenvalues not increasing");
  return result;
}

AsymptoticsReport verify_asymptotics(const std::vector<Eigenpair1D>& eigs1,
                                     const std::vector<Eigenpair1D>& eigs2,
                                     double q_mean) {
  if (eigs1.size() != eigs2.size())
    throw contract_error("verify_asymptotics: mismatched lengths");
  const int n = static_cast<int>(eigs1.size());
  if (n < 5) throw contract_error("verify_asymptotics: need at least 5 pairs");

  AsymptoticsReport report;
  report.xi.resize(n);
  for (int i = 0; i < n; ++i)
    report.xi(i) = eigs2[static_cast<std::size_t>(i)].nu -
                   eigs1[static_cast<std::size_t>(i)].nu - q_mean;

  report.tail_l2.resize(n);
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    acc += report.xi(i) * report.xi(i);
    report.tail_l2(i) = std::sqrt(acc);
  }

  // Windowed average of |xi| (window 3); locate the nonincreasing suffix.
  const int nw = n - 2;
  Eigen::VectorXd w(nw);
  for (int i = 0; i < nw; ++i)
    w(i) = (std::abs(report.xi(i)) + std::abs(report.xi(i + 1)) +
            std::abs(report.xi(i + 2))) / 3.0;
  int s = nw - 1;
  while (s > 0 && w(s - 1) >= w(s) - 1e-15) --s;
  report.decreasing_from = s + 2; // 1-based k of the window center
  report.eventually_decreasing = (nw - s) >= std::max(3, nw / 4);
  return report;
}

int TransverseSpectrum::counting(double r) const {
  const auto it = std::upper_bound(
      modes.begin(), modes.end(), r,
      [](double value, const TransverseMode& m) { return value < m.mu; });
  return static_cast<int>(it - modes.begin());
}

double TransverseSpectrum::psi_overlap(int m, int n, const BoxWindow& omega) const {
  if (omega.dim != dim)
    throw contract_error("psi_overlap: window dimension mismatch");
  const TransverseMode& a = modes.at(static_cast<std::size_t>(m - 1));
  const TransverseMode& b = modes.at(static_cast<std::size_t>(n - 1));
  double out = 1.0;
  for (int i = 0; i < dim; ++i)
    out *= (2.0 / pi) * sine_overlap(a.index[static_cast<std::size_t>(i)],
                                     b.index[static_cast<std::size_t>(i)],
                                     omega.axes[static_cast<std::size_t>(i)].a,
                                     omega.axes[static_cast<std::size_t>(i)].b);
  return out;
}

double TransverseSpectrum::psi_value(int m, const std::array<double, 3>& x) const {
  const TransverseMode& mode = modes.at(static_cast<std::size_t>(m - 1));
  double out = 1.0;
  for (int i = 0; i < dim; ++i)
    out *= std::sqrt(2.0 / pi) *
           std::sin(mode.index[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)]);
  return out;
}

TransverseSpectrum transverse_box_spectrum(int d_minus_1, double cutoff,
                                           std::size_t capacity) {
  if (d_minus_1 < 1 || d_minus_1 > 3)
    throw contract_error("transverse_box_spectrum: dimension must be 1..3");
  if (!(cutoff > 1.0))
    throw contract_error("transverse_box_spectrum: cutoff must be > 1");

  // Volume-based estimate of the mode count before enumerating.
  double estimate = 0.0;
  switch (d_minus_1) {
    case 1: estimate = std::sqrt(cutoff); break;
    case 2: estimate = 0.25 * pi * cutoff + 2.0 * std::sqrt(cutoff); break;
    default: estimate = pi / 6.0 * std::pow(cutoff, 1.5) + pi * cutoff; break;
  }
  if (estimate > static_cast<double>(capacity))
    throw contract_error("transverse_box_spectrum: mode count above capacity");

  TransverseSpectrum spectrum;
  spectrum.dim = d_minus_1;
  spectrum.cutoff = cutoff;
  spectrum.theta1 = d_minus_1 / 2.0;

  const int nmax = static_cast<int>(std::floor(std::sqrt(cutoff)));
  for (int n1 = 1; n1 <= nmax; ++n1) {
    if (d_minus_1 == 1) {
      const double mu = static_cast<double>(n1) * n1;
      if (mu <= cutoff) spectrum.modes.push_back({{n1, 0, 0}, mu});
      continue;
    }
    for (int n2 = 1; n2 <= nmax; ++n2) {
      const double mu2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
      if (mu2 > cutoff) break;
      if (d_minus_1 == 2) {
        spectrum.modes.push_back({{n1, n2, 0}, mu2});
        continue;
      }
      for (int n3 = 1; n3 <= nmax; ++n3) {
        const double mu3 = mu2 + static_cast<double>(n3) * n3;
        if (mu3 > cutoff) break;
        spectrum.modes.push_back({{n1, n2, n3}, mu3});
      }
    }
  }
  if (spectrum.modes.empty())
    throw contract_error("transverse_box_spectrum: empty spectrum");
  std::sort(spectrum.modes.begin(), spectrum.modes.end(),
            [](const TransverseMode& a, const TransverseMode& b) {
              if (a.mu != b.mu) return a.mu < b.mu;
              return a.index < b.index;
            });

  double kappa = 0.0;
  for (std::size_t i = 0; i < spectrum.modes.size(); ++i) {
    if (i + 1 < spectrum.modes.size() &&
        spectrum.modes[i + 1].mu == spectrum.modes[i].mu)
      continue; // evaluate the ratio after the full tie block
    const double r = spectrum.modes[i].mu;
    kappa = std::max(kappa, static_cast<double>(i + 1) /
                                std::pow(r, spectrum.theta1));
  }
  spectrum.kappa1 = kappa;
  return spectrum;
}

ObservationVector observation_vector(const Eigenpair1D& eig, Normalization kind,
                                     std::optional<Window> window) {
  if (kind == Normalization::boundary) {
    if (eig.normalization != Normalization::boundary)
      throw contract_error("observation_vector: eigenpair not boundary-normalized");
    return ObservationVector::make_scalar(eig.derivative_at_0);
  }
  const Window w = window.value_or(eig.window);
  w.validate();
  if (eig.normalization != Normalization::internal ||
      std::abs(w.a - eig.window.a) > 1e-14 || std::abs(w.b - eig.window.b) > 1e-14)
    throw contract_error("observation_vector: eigenpair not normalized on the "
                         "requested window");
  return ObservationVector::make_windowed(eig.samples, w);
}

} // namespace pmc
