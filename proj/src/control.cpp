#include "pmc/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pmc {

namespace {

MinimalTimeEstimate finish_estimate(std::vector<MinimalTimeEstimate::Term> terms) {
  MinimalTimeEstimate est;
  est.terms = std::move(terms);
  est.K = static_cast<int>(est.terms.size());
  est.tail_max.resize(est.K);
  double running = -std::numeric_limits<double>::infinity();
  for (int i = est.K - 1; i >= 0; --i) {
    running = std::max(running, est.terms[static_cast<std::size_t>(i)].ratio);
    est.tail_max(i) = running;
  }
  const int decade_start = std::max(1, static_cast<int>(0.9 * est.K));
  est.last_decade_max = est.tail_from(decade_start);
  est.surrogate = est.last_decade_max;

  const double early = est.tail_from(std::max(1, est.K / 4));
  const double mid = est.tail_from(std::max(1, est.K / 2));
  const double late = est.last_decade_max;
  if (late <= 1e-2 && late <= mid + 1e-12)
    est.trend = MinimalTimeEstimate::Trend::to_zero;
  else if (late > 2.0 * std::max(early, 1e-12) && late > mid)
    est.trend = MinimalTimeEstimate::Trend::growing;
  else
    est.trend = MinimalTimeEstimate::Trend::bounded;
  return est;
}

// Two coupled eigen solves under a common spectrum shift.
struct CoupledEigs {
  std::vector<Eigenpair1D> eigs1;
  std::vector<Eigenpair1D> eigs2;
  double shift = 0.0;
};

CoupledEigs coupled_eigs(const Potential& q, int K, int grid_size,
                         Normalization normalization, Window window) {
  SturmLiouvilleResult r1 =
      sturm_liouville_eigs(Potential::zero(), K, grid_size, normalization, window);
  SturmLiouvilleResult r2 =
      sturm_liouville_eigs(q, K, grid_size, normalization, window);
  const double raw_min = std::min(r1.eigs.front().nu - r1.shift,
                                  r2.eigs.front().nu - r2.shift);
  const double shift = raw_min > 0.0 ? 0.0 : 1.0 - raw_min;
  for (auto& e : r1.eigs) e.nu += shift - r1.shift;
  for (auto& e : r2.eigs) e.nu += shift - r2.shift;
  return {std::move(r1.eigs), std::move(r2.eigs), shift};
}

} // namespace

MinimalTimeEstimate dolecki_T0(double x0, int K) {
  if (!(x0 > 0.0) || !(x0 < pi))
    throw contract_error("dolecki_T0: x0 must lie in (0, pi)");
  if (K < 10) throw contract_error("dolecki_T0: K must be >= 10");
  std::vector<MinimalTimeEstimate::Term> terms;
  terms.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const double s = std::abs(std::sin(k * x0));
    if (s <= 1e-14) {
      std::ostringstream os;
      os << "dolecki_T0: sin(k x0) vanishes at k = " << k
         << "; x0/pi is rational and approximate controllability fails";
      throw approx_controllability_error(os.str());
    }
    MinimalTimeEstimate::Term t;
    t.k = k;
    t.numerator = -std::log(s);
    t.denominator = static_cast<double>(k) * k;
    t.ratio = t.numerator / t.denominator;
    terms.push_back(t);
  }
  return finish_estimate(std::move(terms));
}

MinimalTimeEstimate coupled_T0_boundary(const Potential& q, int K,
                                        int grid_size) {
  const CoupledEigs eigs = coupled_eigs(q, K, grid_size,
                                        Normalization::boundary, Window{});
  // Cross-distinctness; q == 0 trips here.
  merge_labeled(label_spectrum(eigs.eigs1, Normalization::boundary, 1),
                label_spectrum(eigs.eigs2, Normalization::boundary, 2));
  std::vector<MinimalTimeEstimate::Term> terms;
  terms.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const double nu1 = eigs.eigs1[static_cast<std::size_t>(k - 1)].nu;
    const double nu2 = eigs.eigs2[static_cast<std::size_t>(k - 1)].nu;
    MinimalTimeEstimate::Term t;
    t.k = k;
    t.numerator = -std::log(std::abs(nu2 - nu1));
    t.denominator = nu1;
    t.ratio = t.numerator / t.denominator;
    terms.push_back(t);
  }
  return finish_estimate(std::move(terms));
}

MinimalTimeEstimate coupled_T0_internal(const Potential& q, double a, double b,
                                        int K, int grid_size) {
  const Window window{a, b};
  window.validate();
  const CoupledEigs eigs =
      coupled_eigs(q, K, grid_size, Normalization::internal, window);
  merge_labeled(label_spectrum(eigs.eigs1, Normalization::internal, 1, window),
                label_spectrum(eigs.eigs2, Normalization::internal, 2, window));
  std::vector<MinimalTimeEstimate::Term> terms;
  terms.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const auto& e1 = eigs.eigs1[static_cast<std::size_t>(k - 1)];
    const auto& e2 = eigs.eigs2[static_cast<std::size_t>(k - 1)];
    const double s = u2_inner(observation_vector(e1, Normalization::internal),
                              observation_vector(e2, Normalization::internal));
    const double det_g = std::max(0.0, 1.0 - s * s);
    const double gap = e2.nu - e1.nu;
    MinimalTimeEstimate::Term t;
    t.k = k;
    t.numerator = -0.5 * std::log(det_g + gap * gap);
    t.denominator = e1.nu;
    t.ratio = t.numerator / t.denominator;
    terms.push_back(t);
  }
  return finish_estimate(std::move(terms));
}

ModeKey SystemFrame::key_of(const PrimalFamily& primal, int i) const {
  const TensorMode& mode = primal.mode(i);
  const SpectralPoint& point =
      primal.grouped.group(mode.k).members.at(static_cast<std::size_t>(mode.j - 1));
  return ModeKey{mode.m, point.family, point.index};
}

SystemFrame build_system_frame(const SystemSpec& spec, double N_max) {
  if (!(N_max >= 1.0))
    throw contract_error("build_system_frame: N_max must be >= 1");
  if (spec.kind != SystemSpec::Kind::dolecki && spec.b1 * spec.b2 == 0.0)
    throw approx_controllability_error(
        "build_system_frame: coupling b1 b2 must be nonzero");

  SystemFrame frame;
  frame.spec = spec;
  const double mu_cutoff = std::pow(N_max, 1.0 / spec.vartheta) + 1.0;
  frame.transverse = transverse_box_spectrum(spec.dim, std::max(2.0, mu_cutoff));

  const int K_eigs = static_cast<int>(std::ceil(N_max)) + 2;
  if (spec.kind == SystemSpec::Kind::dolecki) {
    if (!(spec.x0 > 0.0) || !(spec.x0 < pi))
      throw contract_error("build_system_frame: x0 must lie in (0, pi)");
    LabeledSpectrum labeled;
    for (int k = 1; k <= K_eigs; ++k) {
      const double s = std::sin(k * spec.x0);
      if (std::abs(s) <= 1e-14)
        throw approx_controllability_error(
            "build_system_frame: sin(k x0) vanishes at k = " + std::to_string(k));
      labeled.push_back({static_cast<double>(k) * k,
                         ObservationVector::make_scalar(std::sqrt(2.0 / pi) * s),
                         1, k});
    }
    frame.grouped = group_spectrum(labeled, 1, 3.0, spec.theta);
    frame.phi_full_norm.resize(1);
    for (int k = 1; k <= K_eigs; ++k)
      frame.phi_full_norm[0].push_back(std::sqrt(pi / 2.0)); // ||sin(kx)||
    return frame;
  }

  const Normalization normalization = spec.kind == SystemSpec::Kind::boundary
                                          ? Normalization::boundary
                                          : Normalization::internal;
  Window window{};
  if (spec.kind == SystemSpec::Kind::internal) {
    window = spec.ab;
    window.validate();
  }
  const CoupledEigs eigs =
      coupled_eigs(spec.q, K_eigs, spec.grid_size, normalization, window);
  frame.shift = eigs.shift;
  const std::optional<Window> obs_window =
      spec.kind == SystemSpec::Kind::internal ? std::optional<Window>(window)
                                              : std::nullopt;
  const LabeledSpectrum merged = merge_labeled(
      label_spectrum(eigs.eigs1, normalization, 1, obs_window),
      label_spectrum(eigs.eigs2, normalization, 2, obs_window));
  frame.grouped = group_spectrum(merged, spec.p, spec.rho, spec.theta);

  frame.phi_full_norm.resize(2);
  const double h = grid_step(spec.grid_size);
  for (const auto* list : {&eigs.eigs1, &eigs.eigs2}) {
    auto& norms = frame.phi_full_norm[list == &eigs.eigs1 ? 0 : 1];
    for (const Eigenpair1D& e : *list)
      norms.push_back(std::sqrt(grid_inner(e.samples, e.samples, h)));
  }
  return frame;
}

double ControlField::l2_norm() const {
  if (dual_coeffs.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, dual_coeffs.dot(duals.coeff * dual_coeffs)));
}

ControlField synthesize_control(const SystemSpec& spec, const ModeCoeffs& y0,
                                double T, double N, const BoxWindow& omega,
                                const SolveOptions& options,
                                std::shared_ptr<const SystemFrame> frame) {
  if (!(T > 0.0)) throw contract_error("synthesize_control: T must be > 0");
  if (spec.kind != SystemSpec::Kind::dolecki && spec.b1 * spec.b2 == 0.0)
    throw approx_controllability_error(
        "synthesize_control: coupling b1 b2 must be nonzero");
  if (!frame)
    frame = std::make_shared<SystemFrame>(build_system_frame(spec, N));

  ControlField control;
  control.kind = spec.kind;
  control.T = T;
  control.N = N;
  control.omega = omega;
  control.frame = frame;
  control.primal = PrimalFamily::build(frame->transverse, frame->grouped, N,
                                       spec.vartheta, T, omega);
  control.duals = restrict_biortho(control.primal, options);

  const int n = control.primal.size();
  control.dual_coeffs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const ModeKey key = frame->key_of(control.primal, i);
    const auto it = y0.find(key);
    const double c0 = it == y0.end() ? 0.0 : it->second;
    const double lambda = control.primal.mode(i).lambda;
    double gamma = -std::exp(-lambda * T) * c0;
    if (spec.kind != SystemSpec::Kind::dolecki) {
      const double bj = key.j == 1 ? spec.b1 : spec.b2;
      gamma *= frame->phi_norm(key.j, key.k) / bj;
    }
    control.dual_coeffs(i) = gamma;
  }

  // Retained moment defect via the Gram identity; the per-mode moment
  // factors cancel against gamma, leaving |G C gamma - gamma|.
  if (n > 0) {
    const Eigen::VectorXd probe =
        control.duals.gram * control.primal_weights() - control.dual_coeffs;
    control.moment_residual = probe.cwiseAbs().maxCoeff();
  }
  return control;
}

CostSweepResult heat_lr_cost_sweep(const BoxWindow& omega,
                                   const std::vector<double>& T_list, int N,
                                   std::optional<double> beta,
                                   const SolveOptions& options, double chat) {
  omega.validate();
  if (T_list.empty()) throw contract_error("heat_lr_cost_sweep: empty T list");
  if (N < 1) throw contract_error("heat_lr_cost_sweep: N must be >= 1");

  CostSweepResult result;
  if (beta) {
    result.beta = *beta;
  } else {
    std::vector<int> Ns;
    for (int n = 2; n <= std::max(4, std::min(N, 8)); ++n) Ns.push_back(n);
    result.beta = estimate_spectral_constant(omega, Ns).beta_hat;
  }

  const TransverseSpectrum spectrum =
      transverse_box_spectrum(omega.dim, static_cast<double>(N) * N + 1.0);
  const int m_count = spectrum.counting(static_cast<double>(N) * N);
  Eigen::MatrixXd overlap(m_count, m_count);
  for (int i = 0; i < m_count; ++i)
    for (int j = i; j < m_count; ++j) {
      overlap(i, j) = spectrum.psi_overlap(i + 1, j + 1, omega);
      overlap(j, i) = overlap(i, j);
    }

  const double theta1 = spectrum.theta1;
  const double sigma = theta1 + 1.0;
  for (const double T : T_list) {
    CostSweepRow row;
    row.T = T;
    if (!(T > 0.0)) throw contract_error("heat_lr_cost_sweep: T must be > 0");

    // Analytic small-time recipe for the weight parameters.
    const double B = chat * (T + 1.0) / std::pow(T, theta1 + 1.5) *
                     (std::sqrt(T) * (1.0 + std::pow(T, theta1 + 1.0)) +
                      2.0 * result.beta + std::sqrt(T));
    const double delta0 = std::max(1.0, 2.0 * std::log(2.0 * B));
    row.alpha0 = 2.0 * result.beta + std::sqrt(T * delta0);
    const double ab = row.alpha0 * result.beta;
    row.eps0 = 2.0 * T * ab / (std::sqrt(ab * ab + 4.0 * sigma * T * ab) + ab);

    try {
      Eigen::MatrixXd G(m_count, m_count);
      for (int i = 0; i < m_count; ++i)
        for (int j = i; j < m_count; ++j) {
          G(i, j) = exp_time_inner(spectrum.mu(i + 1), spectrum.mu(j + 1), T) *
                    overlap(i, j);
          G(j, i) = G(i, j);
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
      if (es.info() != Eigen::Success)
        throw numeric_error("heat_lr_cost_sweep: eigensolve failed");
      const double lmin = es.eigenvalues()(0);
      if (!(lmin > 0.0))
        throw conditioning_error("heat_lr_cost_sweep: Gram numerically singular");
      row.condition = es.eigenvalues()(m_count - 1) / lmin;
      if (row.condition > options.condition_guard)
        throw conditioning_error("heat_lr_cost_sweep: condition above guard");
      double K_estimate = 0.0;
      for (int m = 0; m < m_count; ++m) {
        double inv_diag = 0.0;
        for (int q = 0; q < m_count; ++q)
          inv_diag += es.eigenvectors()(m, q) * es.eigenvectors()(m, q) /
                      es.eigenvalues()(q);
        K_estimate += std::exp(-2.0 * spectrum.mu(m + 1) * T) * inv_diag;
      }
      row.K_estimate = K_estimate;
      row.T_ln_K = T * std::log(K_estimate);
      row.feasible = true;
    } catch (const conditioning_error& err) {
      row.feasible = false;
      row.note = err.what();
    }
    result.rows.push_back(row);
  }
  return result;
}

} // namespace pmc
