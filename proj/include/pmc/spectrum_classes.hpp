#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "pmc/spectral1d.hpp"

namespace pmc {

/// Sorted positive sequence with (optional) class parameters of
/// L(p, rho, theta, kappa).
struct SpectralSequence {
  Eigen::VectorXd values;
  std::optional<int> p;
  std::optional<double> rho;
  std::optional<double> theta;
  std::optional<double> kappa;

  static SpectralSequence from(Eigen::VectorXd v);
  static SpectralSequence from(const std::vector<double>& v);
  void validate() const;
};

/// #\{ lambda in seq : lambda <= r \}, exact by binary search.
int counting_function(const SpectralSequence& seq, double r);

struct ClassReport {
  bool h3_pass = false;
  bool h5_pass = false;
  int max_window_count = 0;     // worst open window of width rho
  double worst_window_at = 0.0; // left edge of that window
  double kappa_fitted = 0.0;    // smallest kappa satisfying H5 on the sample
  double worst_pair_gap = 0.0;
  int worst_pair_count = 0;
  std::string violation;        // empty when both checks pass

  bool pass() const { return h3_pass && h5_pass; }
};

/// Verifies the weak-gap window bound (at most p values in any open window
/// of width rho) and the Hoelder counting bound
/// |N(r1) - N(r2)| <= kappa (1 + |r1 - r2|^theta) on value-anchored pairs.
/// With kappa unset, reports the smallest kappa that passes.
ClassReport verify_class(const SpectralSequence& seq, int p, double rho,
                         double theta, std::optional<double> kappa,
                         double r_max = 0.0, int samples = 10'000);

/// One eigenvalue of the tangential spectrum with its observation and
/// provenance (which source sequence, which index there).
struct SpectralPoint {
  double lambda = 0.0;
  ObservationVector obs;
  int family = 1; // 1-based source tag
  int index = 0;  // 1-based index within the source
};

using LabeledSpectrum = std::vector<SpectralPoint>;

struct Group {
  std::vector<SpectralPoint> members; // strictly increasing in lambda
  double min() const { return members.front().lambda; }
  double max() const { return members.back().lambda; }
  double diameter() const { return max() - min(); }
  int size() const { return static_cast<int>(members.size()); }
  double lambda(int j) const { // 1-based
    return members.at(static_cast<std::size_t>(j - 1)).lambda;
  }
  const ObservationVector& obs(int j) const {
    return members.at(static_cast<std::size_t>(j - 1)).obs;
  }
};

struct GroupedSpectrum {
  std::vector<Group> groups;
  int p = 1;
  double rho = 1.0;
  double theta = 0.5;
  double gap_constant = 0.0; // C(p, rho) = rho / (2p)

  int group_count() const { return static_cast<int>(groups.size()); }
  const Group& group(int k) const { // 1-based
    return groups.at(static_cast<std::size_t>(k - 1));
  }
};

/// Greedy left-to-right grouping: a group closes when the gap to the next
/// value exceeds rho/(2p). Guarantees diameter <= (p-1) rho/(2p) and
/// inter-group gap >= rho/(2p); errors if a group would exceed p elements.
GroupedSpectrum group_spectrum(const LabeledSpectrum& spectrum, int p,
                               double rho, double theta = 0.5);
GroupedSpectrum group_spectrum(const SpectralSequence& seq, int p, double rho,
                               double theta = 0.5);

/// Sorted merge with the cross-distinctness check (tolerance 1e-10);
/// coincident cross-pairs signal loss of approximate controllability.
SpectralSequence merge_sequences(const SpectralSequence& a,
                                 const SpectralSequence& b);
LabeledSpectrum merge_labeled(const LabeledSpectrum& a,
                              const LabeledSpectrum& b);

/// Labeled spectra from eigenpair lists.
LabeledSpectrum label_spectrum(const std::vector<Eigenpair1D>& eigs,
                               Normalization obs_kind, int family_tag,
                               std::optional<Window> window = std::nullopt);

struct TensorMode {
  int m = 0;      // transverse counting rank (1-based)
  int k = 0;      // group index (1-based)
  int j = 0;      // position within the group (1-based)
  double mu = 0.0;
  double lambda_tangential = 0.0;
  double lambda = 0.0; // mu + lambda_tangential, exact sum
};

struct TensorModeSet {
  std::vector<TensorMode> modes;
  double N = 0.0;
  double vartheta = 0.5;
  double b = 1.0;           // vartheta * max(1/(1-vartheta), 1/(1-theta))
  double theta_prime = 1.0; // theta / (1 - theta)
  int transverse_count = 0; // retained transverse modes
  int group_limit = 0;      // retained group indices

  int size() const { return static_cast<int>(modes.size()); }
};

/// Retains exactly the modes with mu_m^vartheta <= N and group index k <= N.
TensorModeSet tensorize(const TransverseSpectrum& transverse,
                        const GroupedSpectrum& grouped, double N,
                        double vartheta);

} // namespace pmc
