#include "pmc/biortho.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace pmc {

namespace {

struct SpdInverse {
  Eigen::MatrixXd inverse;
  double condition = 1.0;
  double residual = 0.0;
  double residual_scaled = 0.0; // defect over the norm scale of each pair
};

// Symmetric positive-definite inverse via eigendecomposition at scalar type
// S, polished by Newton-Schulz steps while they improve the defect. Throws
// past the condition guard.
template <typename S>
SpdInverse invert_spd(const Eigen::MatrixXd& G, double guard,
                      const std::string& what) {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = G.rows();
  Mat Gs = G.template cast<S>();
  Eigen::SelfAdjointEigenSolver<Mat> es(Gs);
  if (es.info() != Eigen::Success)
    throw numeric_error(what + ": Gram eigensolve failed");
  const S lmin = es.eigenvalues()(0);
  const S lmax = es.eigenvalues()(n - 1);
  if (!(lmin > S(0)))
    throw conditioning_error(
        what + ": Gram numerically singular at working precision; lower N "
               "or enable extended precision");
  const double condition = static_cast<double>(lmax / lmin);
  if (condition > guard)
    throw conditioning_error(
        what + ": Gram condition " + std::to_string(condition) +
        " above guard " + std::to_string(guard) +
        "; lower N or enable extended precision");

  Mat X = es.eigenvectors() *
          es.eigenvalues().cwiseInverse().asDiagonal() *
          es.eigenvectors().transpose();
  const Mat I = Mat::Identity(n, n);
  const auto defect = [&](const Mat& Y) {
    return static_cast<double>((Gs * Y - I).cwiseAbs().maxCoeff());
  };
  double res = defect(X);
  for (int it = 0; it < 3; ++it) {
    Mat Xp = X * (S(2) * I - Gs * X);
    Xp = S(0.5) * (Xp + Xp.transpose()).eval();
    const double resp = defect(Xp);
    if (resp >= res) break;
    X.swap(Xp);
    res = resp;
  }

  SpdInverse out;
  out.inverse = X.template cast<double>();
  out.condition = condition;
  out.residual = res;
  const Mat R = Gs * X - I;
  double scaled = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double scale = std::max(
          1.0, std::sqrt(std::max(0.0, static_cast<double>(X(i, i)))) *
                   std::sqrt(static_cast<double>(Gs(j, j))));
      scaled = std::max(scaled, std::abs(static_cast<double>(R(i, j))) / scale);
    }
  out.residual_scaled = scaled;
  return out;
}

SpdInverse invert_spd_at(const Eigen::MatrixXd& G, const SolveOptions& options,
                         const std::string& what) {
  if (options.precision == Precision::extended)
    return invert_spd<long double>(G, options.condition_guard, what);
  return invert_spd<double>(G, options.condition_guard, what);
}

void parallel_rows(int n, int workers, const std::function<void(int)>& body) {
  if (workers <= 1 || n < 32) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

// (M_k^{-1})_{jj} per retained group, used by the envelope diagnostics.
std::vector<Eigen::VectorXd> group_inverse_diagonals(const GroupedSpectrum& grouped,
                                                     int k_limit) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(k_limit));
  for (int k = 1; k <= k_limit; ++k)
    out.push_back(gram_M_k(grouped.group(k), 1e300).inv_diag);
  return out;
}

EnvelopeFit envelope_against(const Eigen::VectorXd& sq_norms,
                             const Eigen::VectorXd& inv_diag,
                             const Eigen::VectorXd& regressor) {
  EnvelopeFit env;
  env.inv_diag = inv_diag;
  Eigen::VectorXd y(sq_norms.size());
  double min_ratio = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sq_norms.size(); ++i) {
    const double ratio = sq_norms(i) / inv_diag(i);
    min_ratio = std::min(min_ratio, ratio);
    y(i) = std::log(std::max(ratio, 1e-300));
  }
  env.min_ratio = min_ratio;
  env.fit = sq_norms.size() >= 2 ? fit_line(regressor, y) : LineFit{};
  return env;
}

// Tangential flat index (k, j) -> 0-based column in per-m blocks.
std::vector<int> tangential_offsets(const GroupedSpectrum& grouped, int k_limit) {
  std::vector<int> off(static_cast<std::size_t>(k_limit + 1), 0);
  for (int k = 1; k <= k_limit; ++k)
    off[static_cast<std::size_t>(k)] =
        off[static_cast<std::size_t>(k - 1)] + grouped.group(k).size();
  return off;
}

} // namespace

PrimalFamily PrimalFamily::build(TransverseSpectrum transverse,
                                 GroupedSpectrum grouped, double N,
                                 double vartheta, double T, BoxWindow omega) {
  if (!(T > 0.0)) throw contract_error("primal family: T must be > 0");
  omega.validate();
  if (omega.dim != transverse.dim)
    throw contract_error("primal family: omega dimension mismatch");
  PrimalFamily family;
  family.modes = tensorize(transverse, grouped, N, vartheta);
  family.transverse = std::move(transverse);
  family.grouped = std::move(grouped);
  family.T = T;
  family.omega = omega;
  return family;
}

SpectralConstantReport estimate_spectral_constant(const BoxWindow& omega,
                                                  const std::vector<int>& N_list) {
  omega.validate();
  if (N_list.empty())
    throw contract_error("estimate_spectral_constant: empty N list");
  const int n_max = *std::max_element(N_list.begin(), N_list.end());
  if (n_max < 1)
    throw contract_error("estimate_spectral_constant: N must be >= 1");

  SpectralConstantReport report;
  report.Ns = N_list;
  report.constants.resize(static_cast<Eigen::Index>(N_list.size()));
  report.log_over_N.resize(static_cast<Eigen::Index>(N_list.size()));

  const TransverseSpectrum spectrum = transverse_box_spectrum(
      omega.dim, static_cast<double>(n_max) * n_max + 1.0);
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

  for (std::size_t idx = 0; idx < N_list.size(); ++idx) {
    const int N = N_list[idx];
    const int m_count = spectrum.counting(static_cast<double>(N) * N);
    if (m_count == 0)
      throw contract_error("estimate_spectral_constant: no modes below N");
    report.retained.push_back(m_count);

    double constant = 1.0;
    if (!omega.is_full()) {
      MatL G(m_count, m_count);
      for (int i = 0; i < m_count; ++i)
        for (int j = i; j < m_count; ++j) {
          long double entry = 1.0L;
          for (int axis = 0; axis < omega.dim; ++axis) {
            const auto ax = static_cast<std::size_t>(axis);
            entry *= (2.0L / pi) *
                     sine_overlap<long double>(
                         spectrum.modes[static_cast<std::size_t>(i)].index[ax],
                         spectrum.modes[static_cast<std::size_t>(j)].index[ax],
                         omega.axes[ax].a, omega.axes[ax].b);
          }
          G(i, j) = entry;
          G(j, i) = entry;
        }
      Eigen::SelfAdjointEigenSolver<MatL> es(G);
      if (es.info() != Eigen::Success)
        throw numeric_error("estimate_spectral_constant: eigensolve failed");
      const long double lmin = es.eigenvalues()(0);
      const long double floor =
          50.0L * m_count * std::numeric_limits<long double>::epsilon() *
          es.eigenvalues()(m_count - 1);
      if (!(lmin > floor))
        throw conditioning_error(
            "estimate_spectral_constant: restricted Gram numerically "
            "singular; omega too small for N at working precision");
      constant = static_cast<double>(1.0L / lmin);
    }
    report.constants(static_cast<Eigen::Index>(idx)) = constant;
    report.log_over_N(static_cast<Eigen::Index>(idx)) = std::log(constant) / N;
  }

  if (N_list.size() >= 2) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(N_list.size()));
    for (std::size_t i = 0; i < N_list.size(); ++i)
      x(static_cast<Eigen::Index>(i)) = static_cast<double>(N_list[i]);
    report.fit = fit_line(x, report.constants.array().log().matrix());
    report.beta_hat = std::max(report.fit.slope, 0.0);
  } else {
    report.beta_hat = report.log_over_N(0);
  }
  if (omega.is_full()) {
    report.fit = LineFit{};
    report.fit.slope = 0.0;
    report.beta_hat = 0.0;
  }
  return report;
}

BiorthFamily biortho_time_family(double mu, const GroupedSpectrum& grouped,
                                 double T, int K_max,
                                 const SolveOptions& options) {
  if (!(T > 0.0)) throw contract_error("biortho_time_family: T must be > 0");
  if (K_max < 1)
    throw contract_error("biortho_time_family: K_max must be >= 1");
  const int k_limit = std::min(K_max, grouped.group_count());
  const std::vector<int> off = tangential_offsets(grouped, k_limit);
  const int n = off[static_cast<std::size_t>(k_limit)];

  Eigen::VectorXd lambdas(n);
  std::vector<const ObservationVector*> obs(static_cast<std::size_t>(n));
  Eigen::VectorXd head(n);
  for (int k = 1; k <= k_limit; ++k)
    for (int j = 1; j <= grouped.group(k).size(); ++j) {
      const int i = off[static_cast<std::size_t>(k - 1)] + j - 1;
      lambdas(i) = mu + grouped.group(k).lambda(j);
      obs[static_cast<std::size_t>(i)] = &grouped.group(k).obs(j);
      head(i) = mu + grouped.group(k).lambda(1);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(lambdas(i) - lambdas(j)) <= 1e-12)
        throw contract_error("biortho_time_family: duplicate eigenvalues");

  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      G(i, j) = exp_time_inner(lambdas(i), lambdas(j), T) *
                u2_inner(*obs[static_cast<std::size_t>(i)],
                         *obs[static_cast<std::size_t>(j)]);
      G(j, i) = G(i, j);
    }

  const SpdInverse solve = invert_spd_at(G, options, "biortho_time_family");

  BiorthFamily family;
  family.region = Region::time_only;
  family.T = T;
  family.eps = 0.0;
  family.gram = G;
  family.coeff = solve.inverse;
  family.sq_norms = solve.inverse.diagonal();
  family.residual = solve.residual;
  family.residual_scaled = solve.residual_scaled;
  family.condition = solve.condition;

  Eigen::VectorXd inv_diag(n);
  const auto mk = group_inverse_diagonals(grouped, k_limit);
  for (int k = 1; k <= k_limit; ++k)
    for (int j = 1; j <= grouped.group(k).size(); ++j)
      inv_diag(off[static_cast<std::size_t>(k - 1)] + j - 1) =
          mk[static_cast<std::size_t>(k - 1)](j - 1);
  family.envelope = envelope_against(
      family.sq_norms, inv_diag,
      head.array().pow(grouped.theta).matrix());
  return family;
}

double BlockMomentSolution::evaluate(int k, double t) const {
  if (t <= eps) return 0.0;
  double acc = 0.0;
  for (Eigen::Index q = 0; q < lambdas.size(); ++q)
    acc += coeff(q, k - 1) * std::exp(-lambdas(q) * (t - eps));
  return acc;
}

double BlockMomentSolution::moment(int k, double lambda) const {
  double acc = 0.0;
  for (Eigen::Index q = 0; q < lambdas.size(); ++q)
    acc += coeff(q, k - 1) * exp_time_inner(lambda, lambdas(q), T - eps);
  return std::exp(-lambda * eps) * acc;
}

BlockMomentSolution block_moment_solve(double mu, const GroupedSpectrum& grouped,
                                       const std::vector<Eigen::VectorXd>& targets,
                                       double eps, double T,
                                       const SolveOptions& options) {
  if (!(T > 0.0)) throw contract_error("block_moment_solve: T must be > 0");
  if (!(eps > 0.0) || !(eps < T / 4.0))
    throw contract_error("block_moment_solve: eps must lie in (0, T/4)");
  const int K = static_cast<int>(targets.size());
  if (K < 1 || K > grouped.group_count())
    throw contract_error("block_moment_solve: bad target count");
  const std::vector<int> off = tangential_offsets(grouped, K);
  const int n = off[static_cast<std::size_t>(K)];

  BlockMomentSolution sol;
  sol.eps = eps;
  sol.T = T;
  sol.mu = mu;
  sol.lambdas.resize(n);
  sol.group_of.resize(static_cast<std::size_t>(n));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, K);
  for (int k = 1; k <= K; ++k) {
    const Group& group = grouped.group(k);
    if (targets[static_cast<std::size_t>(k - 1)].size() != group.size())
      throw contract_error("block_moment_solve: target length mismatch");
    for (int j = 1; j <= group.size(); ++j) {
      const int i = off[static_cast<std::size_t>(k - 1)] + j - 1;
      sol.lambdas(i) = mu + group.lambda(j);
      sol.group_of[static_cast<std::size_t>(i)] = k;
      rhs(i, k - 1) = std::exp(eps * sol.lambdas(i)) *
                      targets[static_cast<std::size_t>(k - 1)](j - 1);
    }
  }

  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      G(i, j) = exp_time_inner(sol.lambdas(i), sol.lambdas(j), T - eps);
      G(j, i) = G(i, j);
    }
  const SpdInverse solve = invert_spd_at(G, options, "block_moment_solve");
  sol.coeff = solve.inverse * rhs;

  sol.norms.resize(K);
  for (int k = 0; k < K; ++k)
    sol.norms(k) = std::sqrt(std::max(0.0, sol.coeff.col(k).dot(G * sol.coeff.col(k))));

  double residual = 0.0;
  const Eigen::MatrixXd probe = G * sol.coeff;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) {
      const double target = sol.group_of[static_cast<std::size_t>(i)] == k + 1
                                ? rhs(i, k) * std::exp(-eps * sol.lambdas(i))
                                : 0.0;
      residual = std::max(residual, std::abs(std::exp(-eps * sol.lambdas(i)) *
                                                 probe(i, k) - target));
    }
  sol.moment_residual = residual;

  sol.envelope_K.resize(K);
  for (int k = 1; k <= K; ++k) {
    const Group& group = grouped.group(k);
    Eigen::VectorXd nodes(group.size());
    std::vector<double> values(static_cast<std::size_t>(group.size()));
    for (int j = 1; j <= group.size(); ++j) {
      nodes(j - 1) = group.lambda(j);
      values[static_cast<std::size_t>(j - 1)] =
          std::exp(eps * group.lambda(j)) *
          targets[static_cast<std::size_t>(k - 1)](j - 1);
    }
    const auto dd = divided_differences(nodes, values);
    double worst = 0.0;
    for (int j = 1; j <= group.size(); ++j)
      worst = std::max(worst, std::abs(dd.at(1, j)));
    sol.envelope_K(k - 1) = worst;
  }
  return sol;
}

BiorthFamily tensor_biortho_full(const PrimalFamily& primal, double eps,
                                 const SolveOptions& options) {
  const double T = primal.T;
  if (!(eps > 0.0) || !(eps < T / 4.0))
    throw contract_error("tensor_biortho_full: eps must lie in (0, T/4)");
  const int n = primal.size();

  BiorthFamily family;
  family.region = Region::full;
  family.T = T;
  family.eps = eps;
  family.coeff = Eigen::MatrixXd::Zero(n, n);
  family.gram = Eigen::MatrixXd::Zero(n, n);
  family.sq_norms.resize(n);
  family.residual = 0.0;
  family.condition = 1.0;

  int block_start = 0;
  while (block_start < n) {
    const int m = primal.mode(block_start).m;
    int block_end = block_start;
    while (block_end < n && primal.mode(block_end).m == m) ++block_end;
    const int bn = block_end - block_start;

    Eigen::MatrixXd G(bn, bn);
    Eigen::VectorXd lambdas(bn);
    for (int i = 0; i < bn; ++i)
      lambdas(i) = primal.mode(block_start + i).lambda;
    for (int i = 0; i < bn; ++i)
      for (int j = i; j < bn; ++j) {
        G(i, j) = exp_time_inner(lambdas(i), lambdas(j), T - eps) *
                  u2_inner(primal.obs(block_start + i),
                           primal.obs(block_start + j));
        G(j, i) = G(i, j);
      }
    const SpdInverse solve = invert_spd_at(G, options, "tensor_biortho_full");
    const Eigen::VectorXd scale = (eps * lambdas.array()).exp();
    const Eigen::MatrixXd C = solve.inverse * scale.asDiagonal();

    family.coeff.block(block_start, block_start, bn, bn) = C;
    family.gram.block(block_start, block_start, bn, bn) = G;
    for (int i = 0; i < bn; ++i)
      family.sq_norms(block_start + i) =
          scale(i) * scale(i) * solve.inverse(i, i);
    const Eigen::MatrixXd probe =
        (-eps * lambdas.array()).exp().matrix().asDiagonal() * (G * C);
    family.residual = std::max(
        family.residual,
        (probe - Eigen::MatrixXd::Identity(bn, bn)).cwiseAbs().maxCoeff());
    family.residual_scaled = std::max(family.residual_scaled, solve.residual_scaled);
    family.condition = std::max(family.condition, solve.condition);
    block_start = block_end;
  }

  const int k_limit = primal.modes.group_limit;
  const auto mk = group_inverse_diagonals(primal.grouped, k_limit);
  Eigen::VectorXd inv_diag(n), regressor(n), descale(n);
  for (int i = 0; i < n; ++i) {
    const TensorMode& mode = primal.mode(i);
    inv_diag(i) = mk[static_cast<std::size_t>(mode.k - 1)](mode.j - 1);
    regressor(i) = std::pow(primal.group_head_lambda(i), primal.grouped.theta);
    descale(i) = std::exp(-2.0 * eps * mode.lambda);
  }
  family.envelope = envelope_against(
      (family.sq_norms.array() * descale.array()).matrix(), inv_diag, regressor);
  return family;
}

namespace {

// Spatial factor matrices shared by the weighted integrals: window overlap
// of psi modes and the U2 inner products of observations.
struct SpatialFactors {
  Eigen::MatrixXd omega_overlap; // over retained modes (pairwise)
  Eigen::MatrixXd u2;            // same indexing
  Eigen::VectorXd lambda;
};

SpatialFactors spatial_factors(const PrimalFamily& primal) {
  const int n = primal.size();
  SpatialFactors f;
  f.omega_overlap.resize(n, n);
  f.u2.resize(n, n);
  f.lambda.resize(n);
  for (int i = 0; i < n; ++i) f.lambda(i) = primal.mode(i).lambda;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      f.omega_overlap(i, j) = primal.transverse.psi_overlap(
          primal.mode(i).m, primal.mode(j).m, primal.omega);
      f.omega_overlap(j, i) = f.omega_overlap(i, j);
      f.u2(i, j) = u2_inner(primal.obs(i), primal.obs(j));
      f.u2(j, i) = f.u2(i, j);
    }
  return f;
}

} // namespace

double weighted_norm_sq(const PrimalFamily& primal, const Eigen::VectorXd& coeffs,
                        const WeightSpec& weight) {
  if (coeffs.size() != primal.size())
    throw contract_error("weighted_norm_sq: coefficient size mismatch");
  if (!(weight.b > 0.0)) throw contract_error("weighted_norm_sq: b must be > 0");
  const int n = primal.size();
  const SpatialFactors f = spatial_factors(primal);
  const double T = primal.T;

  // Part supported on omega: weight is exactly 1 there.
  double on_omega = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      on_omega += coeffs(i) * coeffs(j) * f.omega_overlap(i, j) * f.u2(i, j) *
                  exp_time_inner(f.lambda(i), f.lambda(j), T);

  // Off-omega mass carries the vanishing weight; graded quadrature in time.
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double full = primal.mode(i).m == primal.mode(j).m ? 1.0 : 0.0;
      D(i, j) = coeffs(i) * coeffs(j) * (full - f.omega_overlap(i, j)) * f.u2(i, j);
    }
  const double ab = weight.alpha * weight.beta;
  const double b = weight.b;
  Eigen::VectorXd decay(n);
  const double off_omega = graded_time_integral(
      [&](double t) {
        const double w = std::exp(-ab / std::pow(t, b));
        if (w == 0.0) return 0.0;
        decay = (-t * f.lambda.array()).exp();
        return w * decay.dot(D * decay);
      },
      T);
  return on_omega + std::max(off_omega, 0.0);
}

TPNResult check_tpn(const PrimalFamily& primal, const Eigen::VectorXd& coeffs,
                    const WeightSpec& weight) {
  if (coeffs.size() != primal.size())
    throw contract_error("check_tpn: coefficient size mismatch");
  const int n = primal.size();
  const SpatialFactors f = spatial_factors(primal);
  const double T = primal.T;
  const double ab = weight.alpha * weight.beta;
  const double b = weight.b;

  // Same-m mask folded into the quadratic form once, so each quadrature
  // node costs one exp per mode plus a matrix-vector product.
  Eigen::MatrixXd same_m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (primal.mode(i).m == primal.mode(j).m)
        same_m(i, j) = coeffs(i) * coeffs(j) * f.u2(i, j);
  TPNResult result;
  Eigen::VectorXd decay(n);
  result.lhs = graded_time_integral(
      [&](double t) {
        const double w = std::exp(-ab / std::pow(t, b));
        if (w == 0.0) return 0.0;
        decay = (-t * f.lambda.array()).exp();
        return w * decay.dot(same_m * decay);
      },
      T);
  result.rhs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      result.rhs += coeffs(i) * coeffs(j) * f.omega_overlap(i, j) * f.u2(i, j) *
                    exp_time_inner(f.lambda(i), f.lambda(j), T);
  result.ratio = result.rhs > 0.0
                     ? result.lhs / result.rhs
                     : std::numeric_limits<double>::infinity();
  return result;
}

Eigen::MatrixXd restricted_gram(const PrimalFamily& primal, double T_eff,
                                int workers) {
  const int n = primal.size();
  const SpatialFactors f = spatial_factors(primal);
  Eigen::MatrixXd G(n, n);
  parallel_rows(n, workers, [&](int i) {
    for (int j = i; j < n; ++j) {
      G(i, j) = exp_time_inner(f.lambda(i), f.lambda(j), T_eff) *
                f.omega_overlap(i, j) * f.u2(i, j);
      G(j, i) = G(i, j);
    }
  });
  return G;
}

BiorthFamily restrict_biortho(const PrimalFamily& primal,
                              const SolveOptions& options) {
  primal.omega.validate();
  const int n = primal.size();
  const Eigen::MatrixXd G = restricted_gram(primal, primal.T, options.workers);
  const SpdInverse solve = invert_spd_at(G, options, "restrict_biortho");

  BiorthFamily family;
  family.region = Region::omega;
  family.T = primal.T;
  family.eps = 0.0;
  family.gram = G;
  family.coeff = solve.inverse;
  family.sq_norms = solve.inverse.diagonal();
  family.residual = solve.residual;
  family.residual_scaled = solve.residual_scaled;
  family.condition = solve.condition;

  const int k_limit = primal.modes.group_limit;
  const auto mk = group_inverse_diagonals(primal.grouped, k_limit);
  Eigen::VectorXd inv_diag(n), regressor(n);
  const double b = primal.modes.b;
  for (int i = 0; i < n; ++i) {
    const TensorMode& mode = primal.mode(i);
    inv_diag(i) = mk[static_cast<std::size_t>(mode.k - 1)](mode.j - 1);
    const double head = primal.group_head_lambda(i);
    regressor(i) = std::pow(head, b / (1.0 + b)) +
                   std::pow(head, primal.grouped.theta);
  }
  family.envelope = envelope_against(family.sq_norms, inv_diag, regressor);
  return family;
}

} // namespace pmc
