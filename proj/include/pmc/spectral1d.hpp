#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pmc/errors.hpp"
#include "pmc/kernels.hpp"
#include "pmc/quadrature.hpp"

namespace pmc {

inline constexpr int default_grid_size = 1025;

/// Open interval (a, b) inside [0, pi].
struct Window {
  double a = 0.0;
  double b = pi;

  void validate() const {
    if (!(a >= 0.0) || !(b <= pi + 1e-12) || !(a < b))
      throw contract_error("window: requires 0 <= a < b <= pi");
    if (b - a < 1e-12) throw contract_error("window: degenerate (a == b)");
  }
  bool is_full() const { return a <= 1e-14 && b >= pi - 1e-14; }
};

/// Product window omega = w_1 x ... x w_dim inside the box (0, pi)^dim.
struct BoxWindow {
  int dim = 1;
  std::array<Window, 3> axes{};

  static BoxWindow full(int dim) {
    BoxWindow w;
    w.dim = dim;
    for (int i = 0; i < dim; ++i) w.axes[i] = Window{0.0, pi};
    return w;
  }
  static BoxWindow cube(int dim, double a, double b) {
    BoxWindow w;
    w.dim = dim;
    for (int i = 0; i < dim; ++i) w.axes[i] = Window{a, b};
    return w;
  }
  void validate() const {
    if (dim < 1 || dim > 3) throw contract_error("box window: dim must be 1..3");
    for (int i = 0; i < dim; ++i) axes[i].validate();
  }
  bool is_full() const {
    for (int i = 0; i < dim; ++i)
      if (!axes[i].is_full()) return false;
    return true;
  }
};

enum class Normalization { boundary, internal };

/// Element of the observation space U2: either a scalar (boundary flux) or
/// a grid function restricted to a window (distributed observation).
struct ObservationVector {
  bool scalar_kind = true;
  double scalar = 0.0;
  Eigen::VectorXd samples; // full shared grid, meaningful inside `window`
  Window window{};

  static ObservationVector make_scalar(double v) {
    ObservationVector o;
    o.scalar_kind = true;
    o.scalar = v;
    return o;
  }
  static ObservationVector make_windowed(Eigen::VectorXd s, Window w) {
    ObservationVector o;
    o.scalar_kind = false;
    o.samples = std::move(s);
    o.window = w;
    return o;
  }
};

/// One Dirichlet eigenpair of -u'' + q u on (0, pi), sampled on the shared
/// uniform grid.
struct Eigenpair1D {
  int k = 0;                   // 1-based index in its own sequence
  double nu = 0.0;             // eigenvalue (after any spectrum shift)
  Eigen::VectorXd samples;     // grid values, zero at both endpoints
  double derivative_at_0 = 0.0;
  int grid_size = 0;
  Normalization normalization = Normalization::boundary;
  Window window{}; // normalization window for the internal case
};

/// Potential q on (0, pi). Named kinds evaluate analytically; sampled
/// potentials interpolate their grid cubically.
struct Potential {
  enum class Kind { zero, constant, cos2, sampled };

  Kind kind = Kind::zero;
  double c = 0.0;
  Eigen::VectorXd samples;

  static Potential zero(int grid = default_grid_size);
  static Potential constant(double c, int grid = default_grid_size);
  static Potential cos2(int grid = default_grid_size);
  static Potential from_samples(Eigen::VectorXd samples);
  /// "zero", "const:<c>", "cos2"
  static Potential named(const std::string& name, int grid = default_grid_size);

  double value(double x) const;
  /// Trapezoidal mean of the stored samples.
  double mean() const;
};

struct SturmLiouvilleResult {
  std::vector<Eigenpair1D> eigs;
  double shift = 0.0; // constant added so that inf of the spectrum is > 0
};

/// Explicit Laplacian mode: nu = k^2, phi = sin(kx)/k under the boundary
/// normalization (phi'(0) = 1), rescaled to unit window norm for the
/// internal normalization.
Eigenpair1D dirichlet_laplacian_mode(int k, Normalization normalization,
                                     Window window = {},
                                     int grid_size = default_grid_size);

/// First K Dirichlet eigenpairs of -u'' + q u on (0, pi): symmetric
/// second-order finite differences, eigenvalues Richardson-extrapolated
/// across grids (h, h/2), eigenvectors by tridiagonal inverse iteration.
SturmLiouvilleResult sturm_liouville_eigs(const Potential& q, int K,
                                          int grid_size = default_grid_size,
                                          Normalization normalization = Normalization::boundary,
                                          Window window = {});

struct AsymptoticsReport {
  Eigen::VectorXd xi;          // nu2_k - nu1_k - q_mean
  Eigen::VectorXd tail_l2;     // tail_l2(j) = sqrt(sum_{k >= j} xi_k^2)
  bool eventually_decreasing = false;
  int decreasing_from = -1;    // first index of the nonincreasing window tail
};

AsymptoticsReport verify_asymptotics(const std::vector<Eigenpair1D>& eigs1,
                                     const std::vector<Eigenpair1D>& eigs2,
                                     double q_mean);

struct TransverseMode {
  std::array<int, 3> index{}; // multi-index, entries >= 1
  double mu = 0.0;            // |index|^2
};

/// Transverse spectrum of the Dirichlet Laplacian on the box (0, pi)^dim:
/// all mu = sum n_i^2 <= cutoff with multiplicity, sorted.
struct TransverseSpectrum {
  int dim = 1;
  double cutoff = 0.0;
  std::vector<TransverseMode> modes;
  double kappa1 = 0.0;            // fitted counting constant
  double theta1 = 0.5;            // (d-1)/2 for the box

  int counting(double r) const;   // #\{ mu_m <= r \}
  double mu(int m) const {        // 1-based
    if (m < 1 || m > static_cast<int>(modes.size()))
      throw contract_error("transverse spectrum: mode index out of range");
    return modes[static_cast<std::size_t>(m - 1)].mu;
  }
  /// L2(omega) inner product of the orthonormal eigenfunctions psi_m, psi_n
  /// over a product window; closed-form sines per axis.
  double psi_overlap(int m, int n, const BoxWindow& omega) const;
  /// Pointwise value of psi_m at x' (for sampled exports).
  double psi_value(int m, const std::array<double, 3>& x) const;
};

TransverseSpectrum transverse_box_spectrum(int d_minus_1, double cutoff,
                                           std::size_t capacity = 4'000'000);

/// Observation attached to an eigenpair: the boundary kind yields the scalar
/// phi'(0) (= 1 under the boundary normalization), the internal kind the
/// unit-norm window restriction.
ObservationVector observation_vector(const Eigenpair1D& eig, Normalization kind,
                                     std::optional<Window> window = std::nullopt);

} // namespace pmc
