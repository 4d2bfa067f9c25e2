#include "pmc/spectrum_classes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pmc {

SpectralSequence SpectralSequence::from(Eigen::VectorXd v) {
  SpectralSequence seq;
  seq.values = std::move(v);
  seq.validate();
  return seq;
}

SpectralSequence SpectralSequence::from(const std::vector<double>& v) {
  return from(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                static_cast<Eigen::Index>(v.size())));
}

void SpectralSequence::validate() const {
  if (values.size() == 0)
    throw contract_error("spectral sequence: empty");
  if (!(values(0) > 0.0))
    throw contract_error("spectral sequence: values must be positive");
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values(i) < values(i - 1))
      throw contract_error("spectral sequence: values must be nondecreasing");
}

int counting_function(const SpectralSequence& seq, double r) {
  if (!(r > 0.0)) throw contract_error("counting_function: r must be > 0");
  const double* begin = seq.values.data();
  const double* end = begin + seq.values.size();
  return static_cast<int>(std::upper_bound(begin, end, r) - begin);
}

ClassReport verify_class(const SpectralSequence& seq, int p, double rho,
                         double theta, std::optional<double> kappa,
                         double r_max, int samples) {
  seq.validate();
  if (p < 1 || !(rho > 0.0) || !(theta > 0.0) || !(theta < 1.0))
    throw contract_error("verify_class: need p >= 1, rho > 0, theta in (0,1)");
  if (kappa && !(*kappa > 0.0))
    throw contract_error("verify_class: kappa must be > 0");

  const Eigen::VectorXd& v = seq.values;
  Eigen::Index n = v.size();
  if (r_max > 0.0) {
    Eigen::Index cut = 0;
    while (cut < n && v(cut) <= r_max) ++cut;
    n = cut;
    if (n == 0) throw contract_error("verify_class: no values below r_max");
  }

  ClassReport report;

  // H3: the supremum over open width-rho windows equals the largest number
  // of values inside some [v_j, v_j + rho).
  // Spans within one part in 1e12 of rho count as closing the open window;
  // eigenvalues are not resolved beyond that anyway.
  const double rho_strict = rho * (1.0 - 1e-12);
  Eigen::Index right = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (right < j) right = j;
    while (right < n && v(right) - v(j) < rho_strict) ++right;
    const int count = static_cast<int>(right - j);
    if (count > report.max_window_count) {
      report.max_window_count = count;
      report.worst_window_at = v(j);
    }
  }
  report.h3_pass = report.max_window_count <= p;

  // H5 on value-anchored pairs: for a fixed count offset the binding pair is
  // the one with the smallest gap, so scanning offsets suffices. Offsets are
  // geometrically thinned to respect the sample budget.
  std::set<Eigen::Index> offsets;
  for (Eigen::Index c = 1; c < n && c <= 64; ++c) offsets.insert(c);
  for (double c = 64.0; c < static_cast<double>(n); c *= 1.1)
    offsets.insert(static_cast<Eigen::Index>(c));
  if (n >= 2) offsets.insert(n - 1);
  while (static_cast<double>(offsets.size()) * static_cast<double>(n) >
             4.0 * static_cast<double>(samples) &&
         offsets.size() > 16) {
    auto it = offsets.begin();
    std::advance(it, static_cast<long>(offsets.size() / 3));
    offsets.erase(it);
  }

  double kappa_hat = 1.0; // pairs with equal endpoints give ratio 1
  for (const Eigen::Index c : offsets) {
    double gap_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j + c < n; ++j)
      gap_min = std::min(gap_min, v(j + c) - v(j));
    if (!std::isfinite(gap_min)) continue;
    const double ratio =
        static_cast<double>(c + 1) / (1.0 + std::pow(gap_min, theta));
    if (ratio > kappa_hat) {
      kappa_hat = ratio;
      report.worst_pair_gap = gap_min;
      report.worst_pair_count = static_cast<int>(c + 1);
    }
  }
  report.kappa_fitted = kappa_hat;
  report.h5_pass = !kappa || kappa_hat <= *kappa * (1.0 + 1e-12);

  if (!report.h3_pass) {
    std::ostringstream os;
    os << "H3 violated: window [" << report.worst_window_at << ", "
       << report.worst_window_at + rho << ") holds " << report.max_window_count
       << " > p = " << p;
    report.violation = os.str();
  } else if (!report.h5_pass) {
    std::ostringstream os;
    os << "H5 violated: " << report.worst_pair_count << " values within gap "
       << report.worst_pair_gap << " need kappa >= " << kappa_hat;
    report.violation = os.str();
  }
  return report;
}

GroupedSpectrum group_spectrum(const LabeledSpectrum& spectrum, int p,
                               double rho, double theta) {
  if (spectrum.empty()) throw contract_error("group_spectrum: empty spectrum");
  if (p < 1 || !(rho > 0.0))
    throw contract_error("group_spectrum: need p >= 1 and rho > 0");
  for (std::size_t i = 1; i < spectrum.size(); ++i)
    if (spectrum[i].lambda < spectrum[i - 1].lambda)
      throw contract_error("group_spectrum: spectrum must be sorted");

  GroupedSpectrum grouped;
  grouped.p = p;
  grouped.rho = rho;
  grouped.theta = theta;
  grouped.gap_constant = rho / (2.0 * p);

  const double threshold = grouped.gap_constant;
  Group current;
  const auto flush = [&]() {
    if (!current.members.empty()) {
      grouped.groups.push_back(std::move(current));
      current = Group{};
    }
  };
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (!current.members.empty() &&
        spectrum[i].lambda - current.members.back().lambda > threshold)
      flush();
    current.members.push_back(spectrum[i]);
    if (current.size() > p) {
      std::ostringstream os;
      os << "group_spectrum: window [" << current.min() << ", "
         << current.members.back().lambda << "] holds more than p = " << p
         << " values; class assumption violated";
      throw contract_error(os.str());
    }
  }
  flush();

  for (std::size_t k = 0; k + 1 < grouped.groups.size(); ++k) {
    if (grouped.groups[k].diameter() > rho)
      throw contract_error("group_spectrum: diameter invariant violated");
    if (grouped.groups[k + 1].min() - grouped.groups[k].max() <
        grouped.gap_constant)
      throw contract_error("group_spectrum: inter-group gap invariant violated");
  }
  return grouped;
}

GroupedSpectrum group_spectrum(const SpectralSequence& seq, int p, double rho,
                               double theta) {
  seq.validate();
  LabeledSpectrum labeled;
  labeled.reserve(static_cast<std::size_t>(seq.values.size()));
  for (Eigen::Index i = 0; i < seq.values.size(); ++i)
    labeled.push_back({seq.values(i), ObservationVector::make_scalar(1.0), 1,
                       static_cast<int>(i + 1)});
  return group_spectrum(labeled, p, rho, theta);
}

namespace {

void check_cross_distinctness(const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b) {
  constexpr double tol = 1e-10;
  Eigen::Index jlo = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    while (jlo < b.size() && b(jlo) < a(i) - tol) ++jlo;
    for (Eigen::Index j = jlo; j < b.size() && b(j) <= a(i) + tol; ++j) {
      std::ostringstream os;
      os << "distinctness violation: cross eigenvalues coincide at " << a(i)
         << " (|gap| <= 1e-10); approximate controllability fails";
      throw approx_controllability_error(os.str());
    }
  }
}

} // namespace

SpectralSequence merge_sequences(const SpectralSequence& a,
                                 const SpectralSequence& b) {
  a.validate();
  b.validate();
  check_cross_distinctness(a.values, b.values);
  Eigen::VectorXd merged(a.values.size() + b.values.size());
  std::merge(a.values.data(), a.values.data() + a.values.size(),
             b.values.data(), b.values.data() + b.values.size(),
             merged.data());
  return SpectralSequence::from(std::move(merged));
}

LabeledSpectrum merge_labeled(const LabeledSpectrum& a,
                              const LabeledSpectrum& b) {
  Eigen::VectorXd va(static_cast<Eigen::Index>(a.size()));
  Eigen::VectorXd vb(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    va(static_cast<Eigen::Index>(i)) = a[i].lambda;
  for (std::size_t i = 0; i < b.size(); ++i)
    vb(static_cast<Eigen::Index>(i)) = b[i].lambda;
  check_cross_distinctness(va, vb);
  LabeledSpectrum merged;
  merged.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(),
             std::back_inserter(merged),
             [](const SpectralPoint& x, const SpectralPoint& y) {
               return x.lambda < y.lambda;
             });
  return merged;
}

LabeledSpectrum label_spectrum(const std::vector<Eigenpair1D>& eigs,
                               Normalization obs_kind, int family_tag,
                               std::optional<Window> window) {
  LabeledSpectrum out;
  out.reserve(eigs.size());
  for (const Eigenpair1D& eig : eigs)
    out.push_back({eig.nu, observation_vector(eig, obs_kind, window),
                   family_tag, eig.k});
  return out;
}

TensorModeSet tensorize(const TransverseSpectrum& transverse,
                        const GroupedSpectrum& grouped, double N,
                        double vartheta) {
  if (!(vartheta > 0.0) || !(vartheta < 1.0))
    throw contract_error("tensorize: vartheta must lie in (0,1)");
  if (!(N >= 1.0)) throw contract_error("tensorize: N must be >= 1");

  TensorModeSet set;
  set.N = N;
  set.vartheta = vartheta;
  set.theta_prime = grouped.theta / (1.0 - grouped.theta);
  set.b = vartheta * std::max(1.0 / (1.0 - vartheta), 1.0 / (1.0 - grouped.theta));

  const int k_limit = std::min(grouped.group_count(), static_cast<int>(std::floor(N)));
  int m_count = 0;
  for (int m = 1; m <= static_cast<int>(transverse.modes.size()); ++m) {
    const double mu = transverse.mu(m);
    if (std::pow(mu, vartheta) > N) break;
    ++m_count;
    for (int k = 1; k <= k_limit; ++k) {
      const Group& group = grouped.group(k);
      for (int j = 1; j <= group.size(); ++j) {
        TensorMode mode;
        mode.m = m;
        mode.k = k;
        mode.j = j;
        mode.mu = mu;
        mode.lambda_tangential = group.lambda(j);
        mode.lambda = mu + group.lambda(j);
        set.modes.push_back(mode);
      }
    }
  }
  set.transverse_count = m_count;
  set.group_limit = k_limit;
  if (set.modes.empty())
    throw contract_error("tensorize: empty retained mode set");
  return set;
}

} // namespace pmc
