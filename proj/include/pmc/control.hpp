#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmc/biortho.hpp"
#include "pmc/spectral1d.hpp"
#include "pmc/spectrum_classes.hpp"

namespace pmc {

/// Finite-K surrogate of a limsup-type minimal-time formula: the full ratio
/// sequence plus running maxima over tails.
struct MinimalTimeEstimate {
  struct Term {
    int k = 0;
    double numerator = 0.0;   // -log(quantity)
    double denominator = 0.0; // nu_k^{(1)}
    double ratio = 0.0;
  };
  enum class Trend { to_zero, bounded, growing };

  std::vector<Term> terms;
  Eigen::VectorXd tail_max;   // tail_max(i) = max_{k > i} ratio_k (0-based)
  double surrogate = 0.0;     // tail maximum over the last decade of k
  double last_decade_max = 0.0;
  int K = 0;
  Trend trend = Trend::bounded;

  double tail_from(int k_min) const { // 1-based k_min
    return tail_max(std::min<Eigen::Index>(tail_max.size() - 1, k_min - 1));
  }
};

/// Pointwise-control minimal time surrogate: ratios -ln|sin(k x0)| / k^2.
/// Errors out when sin(k x0) vanishes for some k <= K (x0/pi rational).
MinimalTimeEstimate dolecki_T0(double x0, int K);

/// Boundary-coupled surrogate: -log|nu_k^{(2)} - nu_k^{(1)}| / nu_k^{(1)}.
MinimalTimeEstimate coupled_T0_boundary(const Potential& q, int K,
                                        int grid_size = default_grid_size);

/// Internal-coupled surrogate with the window Gram determinant:
/// -log sqrt(det G_k + gap^2) / nu_k^{(1)}.
MinimalTimeEstimate coupled_T0_internal(const Potential& q, double a, double b,
                                        int K, int grid_size = default_grid_size);

struct SystemSpec {
  enum class Kind { dolecki, boundary, internal };

  Kind kind = Kind::dolecki;
  int dim = 1;           // dimension of Omega1
  double x0 = 1.0;       // dolecki pointwise-control abscissa
  Potential q;           // coupled-system potential
  double b1 = 1.0;       // coupling vector
  double b2 = 1.0;
  Window ab{};           // internal observation window
  int grid_size = default_grid_size;
  int p = 2;             // tangential class parameters for the grouping
  double rho = 3.0;
  double theta = 0.5;
  double vartheta = 0.5;
};

/// Identity of one eigenvector of a system: transverse rank m, component
/// j (1 or 2; always 1 for the pointwise system), tangential index k within
/// its own sequence. Coefficients are taken against the L2-orthonormalized
/// eigenvectors.
struct ModeKey {
  int m = 0;
  int j = 0;
  int k = 0;
  auto operator<=>(const ModeKey&) const = default;
};

using ModeCoeffs = std::map<ModeKey, double>;

/// Spectral data a system exposes to synthesis and simulation: transverse
/// spectrum, grouped tangential spectrum with framework observations, and
/// the full-domain norms of the tangentially normalized eigenfunctions.
struct SystemFrame {
  SystemSpec spec;
  TransverseSpectrum transverse;
  GroupedSpectrum grouped;
  std::vector<std::vector<double>> phi_full_norm; // [family-1][index-1]
  double shift = 0.0;

  ModeKey key_of(const PrimalFamily& primal, int i) const;
  double phi_norm(int family, int index) const {
    return phi_full_norm.at(static_cast<std::size_t>(family - 1))
        .at(static_cast<std::size_t>(index - 1));
  }
};

/// Builds a frame whose grouped spectrum covers group indices k <= N_max and
/// whose transverse spectrum covers mu^vartheta <= N_max.
SystemFrame build_system_frame(const SystemSpec& spec, double N_max);

/// Synthesized control as mode coefficients over the dual family.
struct ControlField {
  SystemSpec::Kind kind = SystemSpec::Kind::dolecki;
  double T = 1.0;
  double N = 1.0;
  BoxWindow omega;
  std::shared_ptr<const SystemFrame> frame;
  PrimalFamily primal;
  BiorthFamily duals;
  Eigen::VectorXd dual_coeffs;   // gamma per retained mode
  double moment_residual = 0.0;  // max defect of the retained moment equations

  /// Expansion of the control over the primal exponentials.
  Eigen::VectorXd primal_weights() const { return duals.coeff * dual_coeffs; }
  double l2_norm() const;
  bool is_zero() const { return dual_coeffs.size() == 0 || dual_coeffs.isZero(0.0); }
};

/// Moment-method synthesis: gamma = (-1/b_j) <y0, Phi> e^{-nu T} per retained
/// mode, duals from restrict_biortho on (0,T) x omega.
ControlField synthesize_control(const SystemSpec& spec, const ModeCoeffs& y0,
                                double T, double N, const BoxWindow& omega,
                                const SolveOptions& options = {},
                                std::shared_ptr<const SystemFrame> frame = nullptr);

struct CostSweepRow {
  double T = 0.0;
  bool feasible = false;
  double K_estimate = 0.0; // sum_m e^{-2 mu_m T} ||Q_m||^2
  double T_ln_K = 0.0;
  double eps0 = 0.0;       // analytic epsilon optimizer
  double alpha0 = 0.0;     // analytic alpha threshold
  double condition = 0.0;
  std::string note;
};

struct CostSweepResult {
  std::vector<CostSweepRow> rows;
  double beta = 0.0; // supplied or fitted spectral constant rate
};

/// Heat-control cost sweep over final times: duals to e^{-mu_m t} psi_m on
/// (0,T) x omega, cost constant, and the analytic (eps0, alpha0) recipe.
CostSweepResult heat_lr_cost_sweep(const BoxWindow& omega,
                                   const std::vector<double>& T_list, int N,
                                   std::optional<double> beta = std::nullopt,
                                   const SolveOptions& options = {},
                                   double chat = 1.0);

} // namespace pmc
