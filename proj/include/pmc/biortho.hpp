#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "pmc/gram.hpp"
#include "pmc/quadrature.hpp"
#include "pmc/spectral1d.hpp"
#include "pmc/spectrum_classes.hpp"

namespace pmc {

enum class Region { full, omega, time_only };
enum class Precision { double_prec, extended };

struct SolveOptions {
  double condition_guard = 1e12;
  Precision precision = Precision::double_prec;
  int workers = 1;
};

/// The truncated primal family F_{m,k}^{(j)}(t,x') = e^{-lambda t} psi_m(x')
/// C2phi_k^{(j)} over a retained tensor mode set, with its horizon and
/// control window.
struct PrimalFamily {
  TransverseSpectrum transverse;
  GroupedSpectrum grouped;
  TensorModeSet modes;
  double T = 1.0;
  BoxWindow omega;

  static PrimalFamily build(TransverseSpectrum transverse,
                            GroupedSpectrum grouped, double N, double vartheta,
                            double T, BoxWindow omega);

  int size() const { return modes.size(); }
  const TensorMode& mode(int i) const {
    return modes.modes.at(static_cast<std::size_t>(i));
  }
  const ObservationVector& obs(int i) const {
    const TensorMode& mode_i = mode(i);
    return grouped.group(mode_i.k).obs(mode_i.j);
  }
  /// lambda_{m,k}^{(1)} of the group the i-th mode belongs to.
  double group_head_lambda(int i) const {
    const TensorMode& mode_i = mode(i);
    return mode_i.mu + grouped.group(mode_i.k).lambda(1);
  }
};

struct EnvelopeFit {
  LineFit fit;                 // log(norm^2 / (M_k^{-1})_jj) vs regressor
  double min_ratio = 0.0;      // min over modes of norm^2 / (M_k^{-1})_jj
  Eigen::VectorXd inv_diag;    // (M_k^{-1})_jj per mode
};

/// Minimal-norm biorthogonal family represented by its coefficient matrix in
/// the span of the (possibly time-shifted) primal exponentials. Column i of
/// `coeff` gives the expansion of the dual element Q_i; its elements vanish
/// on (0, eps) and use exponentials e^{-lambda (t - eps)}.
struct BiorthFamily {
  Region region = Region::omega;
  double T = 1.0;
  double eps = 0.0;
  Eigen::MatrixXd coeff;
  Eigen::MatrixXd gram;      // Gram of the shifted exponentials on (0, T-eps)
  Eigen::VectorXd sq_norms;  // squared norms; equals e^{2 eps l}*(G^{-1})_ii
  double residual = 0.0;     // max biorthogonality defect at work precision
  double residual_scaled = 0.0; // defect relative to ||Q_i|| ||F_j||
  double condition = 1.0;
  EnvelopeFit envelope;
};

struct SpectralConstantReport {
  std::vector<int> Ns;
  std::vector<int> retained;   // transverse modes per N
  Eigen::VectorXd constants;   // sharp restricted-Gram constants
  Eigen::VectorXd log_over_N;  // log(constant) / N
  LineFit fit;                 // log(constant) vs N
  double beta_hat = 0.0;       // fitted slope
};

/// Sharp spectral-inequality constants sup ||sum b_m psi_m||^2_{Omega1} /
/// ||.||^2_omega over packets sqrt(mu_m) <= N, as 1/lambda_min of the
/// restricted Gram; beta_hat is the fitted exponential rate. The constants
/// grow like e^{beta N}, so the solve runs in extended precision and only a
/// working-precision singularity test guards it.
SpectralConstantReport estimate_spectral_constant(const BoxWindow& omega,
                                                  const std::vector<int>& N_list);

/// Minimal-norm biorthogonal family to {e^{-(lambda_k^{(j)} + mu) t}
/// C2phi_k^{(j)}} in L^2(0,T; U2) for a fixed transverse eigenvalue mu,
/// groups k <= K_max.
BiorthFamily biortho_time_family(double mu, const GroupedSpectrum& grouped,
                                 double T, int K_max,
                                 const SolveOptions& options = {});

struct BlockMomentSolution {
  double eps = 0.0;
  double T = 1.0;
  double mu = 0.0;
  Eigen::VectorXd lambdas;        // stacked lambda_{m,k}^{(j)}
  std::vector<int> group_of;      // group index per stacked mode (1-based)
  Eigen::MatrixXd coeff;          // column l: r_l over shifted exponentials
  Eigen::VectorXd norms;          // L^2(0,T) norms per group
  double moment_residual = 0.0;
  Eigen::VectorXd envelope_K;     // divided-difference factor per group

  /// r_k(t); vanishes on (0, eps].
  double evaluate(int k, double t) const;
  /// Closed form of int_0^T e^{-lambda t} r_k(t) dt.
  double moment(int k, double lambda) const;
};

/// Solves the block moment problem with targets f_k^{(j)}: the returned
/// family vanishes on (0, eps) and satisfies
///   int_0^T e^{-lambda_{m,k}^{(j)} t} r_l(t) dt = delta_{kl} f_k^{(j)}.
BlockMomentSolution block_moment_solve(double mu, const GroupedSpectrum& grouped,
                                       const std::vector<Eigen::VectorXd>& targets,
                                       double eps, double T,
                                       const SolveOptions& options = {});

/// Full-cylinder biorthogonal family on (0,T) x Omega1 with elements
/// vanishing on (0, eps); block-diagonal across transverse modes.
BiorthFamily tensor_biortho_full(const PrimalFamily& primal, double eps,
                                 const SolveOptions& options = {});

/// Weight e^{-eta_alpha(x') / t^b}: equal to 1 on omega, to
/// e^{-alpha beta / t^b} on Omega1 \ omega.
struct WeightSpec {
  double alpha = 1.0;
  double beta = 1.0;
  double b = 1.0;
  BoxWindow omega;
};

/// Weighted squared norm of P = sum a_i F_i over (0,T) x Omega1 under the
/// eta_alpha profile (weight 1 on omega).
double weighted_norm_sq(const PrimalFamily& primal, const Eigen::VectorXd& coeffs,
                        const WeightSpec& weight);

struct TPNResult {
  double lhs = 0.0;  // int e^{-alpha beta / t^b} |P|^2 over (0,T) x Omega1
  double rhs = 0.0;  // int |P|^2 over (0,T) x omega
  double ratio = 0.0;
};

/// Evaluates both sides of the restriction inequality for P = sum a_i F_i.
TPNResult check_tpn(const PrimalFamily& primal, const Eigen::VectorXd& coeffs,
                    const WeightSpec& weight);

/// Minimal-norm biorthogonal family in L^2((0,T) x omega; U2) by inversion
/// of the restricted Gram over the retained modes.
BiorthFamily restrict_biortho(const PrimalFamily& primal,
                              const SolveOptions& options = {});

/// Gram of the restricted primal family (time kernel x window overlap x U2
/// inner product); T_eff allows assembling on a shortened horizon.
Eigen::MatrixXd restricted_gram(const PrimalFamily& primal, double T_eff,
                                int workers = 1);

} // namespace pmc
