#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "pmc/kernels.hpp"
#include "pmc/spectral1d.hpp"
#include "pmc/spectrum_classes.hpp"

namespace pmc {

/// Full triangular table of divided differences over pairwise distinct
/// nodes. Values may live in any linear space with subtraction and division
/// by a scalar (double, Eigen vectors, ...).
template <typename Value>
struct DividedDifferenceTable {
  Eigen::VectorXd nodes;
  std::vector<std::vector<Value>> table; // table[o-1][i] = f[x_i, ..., x_{i+o-1}]

  /// f[x_i, ..., x_{i+order-1}], both arguments 1-based.
  const Value& at(int i, int order) const {
    return table.at(static_cast<std::size_t>(order - 1))
        .at(static_cast<std::size_t>(i - 1));
  }
  const Value& top() const { return table.back().front(); }
  int order() const { return static_cast<int>(table.size()); }
};

template <typename Value>
DividedDifferenceTable<Value> divided_differences(const Eigen::VectorXd& nodes,
                                                  const std::vector<Value>& values) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0 || values.size() != static_cast<std::size_t>(n))
    throw contract_error("divided_differences: nodes/values size mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(nodes(i) - nodes(j)) <= 1e-12)
        throw contract_error("divided_differences: coincident nodes");

  DividedDifferenceTable<Value> dd;
  dd.nodes = nodes;
  dd.table.resize(static_cast<std::size_t>(n));
  dd.table[0] = values;
  for (int o = 2; o <= n; ++o) {
    auto& row = dd.table[static_cast<std::size_t>(o - 1)];
    const auto& prev = dd.table[static_cast<std::size_t>(o - 2)];
    row.reserve(static_cast<std::size_t>(n - o + 1));
    for (int i = 0; i + o <= n; ++i) {
      Value num = prev[static_cast<std::size_t>(i)];
      num -= prev[static_cast<std::size_t>(i + 1)];
      row.push_back(num / (nodes(i) - nodes(i + o - 1)));
    }
  }
  return dd;
}

/// Weight matrix of the group Gram sum: entry (l, j), both 1-based, is
///   delta_l^j = prod_{i < l} (lambda^{(j)} - lambda^{(i)}),  delta_1^j = 1.
/// Vanishes for j < l.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
delta_weights(const Eigen::VectorXd& lambdas) {
  const int g = static_cast<int>(lambdas.size());
  if (g == 0) throw contract_error("delta_weights: empty group");
  for (int i = 1; i < g; ++i)
    if (!(lambdas(i) > lambdas(i - 1)))
      throw contract_error("delta_weights: group must be strictly increasing");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> delta(g, g);
  for (int j = 0; j < g; ++j) {
    delta(0, j) = Scalar(1);
    Scalar prod(1);
    for (int l = 1; l < g; ++l) {
      prod *= Scalar(lambdas(j) - lambdas(l - 1));
      delta(l, j) = prod;
    }
  }
  return delta;
}

/// Inner product on the observation space U2: plain product for scalars,
/// window-restricted L2 product for distributed observations.
inline double u2_inner(const ObservationVector& x, const ObservationVector& y) {
  if (x.scalar_kind != y.scalar_kind)
    throw contract_error("u2_inner: mixed observation kinds");
  if (x.scalar_kind) return x.scalar * y.scalar;
  if (x.samples.size() != y.samples.size())
    throw contract_error("u2_inner: grid size mismatch");
  if (std::abs(x.window.a - y.window.a) > 1e-14 ||
      std::abs(x.window.b - y.window.b) > 1e-14)
    throw contract_error("u2_inner: window mismatch");
  return window_integral((x.samples.array() * y.samples.array()).matrix(),
                         x.window.a, x.window.b);
}

struct GroupGram {
  Eigen::MatrixXd M;          // symmetric positive definite
  Eigen::MatrixXd delta;      // delta weights used in the assembly
  Eigen::VectorXd inv_diag;   // (M^{-1})_{jj}
  double determinant = 0.0;
  double condition = 1.0;
  std::vector<int> renumber;  // renumber[j-1] = column offset of eigenvalue j
};

/// Group matrix M_k = sum_l Gram_{U2}(delta_l^1 o^(1), ..., delta_l^g o^(g)).
/// The geometrically multiple variant takes several observations per
/// eigenvalue; columns follow the renumbering (j, i) -> off_j + i.
inline GroupGram gram_M_k(const Eigen::VectorXd& lambdas,
                          const std::vector<std::vector<ObservationVector>>& obs,
                          double condition_guard = 1e12) {
  const int g = static_cast<int>(lambdas.size());
  if (g == 0 || obs.size() != static_cast<std::size_t>(g))
    throw contract_error("gram_M_k: eigenvalues/observations mismatch");

  GroupGram out;
  out.delta = delta_weights(lambdas);
  const Eigen::MatrixXd W = out.delta.transpose() * out.delta; // W(j,j') = sum_l d_l^j d_l^j'

  out.renumber.resize(static_cast<std::size_t>(g));
  int size = 0;
  for (int j = 0; j < g; ++j) {
    if (obs[static_cast<std::size_t>(j)].empty())
      throw contract_error("gram_M_k: eigenvalue without observations");
    out.renumber[static_cast<std::size_t>(j)] = size;
    size += static_cast<int>(obs[static_cast<std::size_t>(j)].size());
  }

  out.M.resize(size, size);
  for (int j = 0; j < g; ++j)
    for (std::size_t i = 0; i < obs[static_cast<std::size_t>(j)].size(); ++i)
      for (int jp = 0; jp < g; ++jp)
        for (std::size_t ip = 0; ip < obs[static_cast<std::size_t>(jp)].size(); ++ip) {
          const int row = out.renumber[static_cast<std::size_t>(j)] + static_cast<int>(i);
          const int col = out.renumber[static_cast<std::size_t>(jp)] + static_cast<int>(ip);
          if (col < row) continue;
          const double val = W(j, jp) * u2_inner(obs[static_cast<std::size_t>(j)][i],
                                                 obs[static_cast<std::size_t>(jp)][ip]);
          out.M(row, col) = val;
          out.M(col, row) = val;
        }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.M);
  if (es.info() != Eigen::Success)
    throw numeric_error("gram_M_k: eigensolve failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  if (!(ev(0) > 0.0))
    throw contract_error("gram_M_k: M_k singular; observations within an "
                         "eigenvalue are linearly dependent");
  out.condition = ev(size - 1) / ev(0);
  if (out.condition > condition_guard)
    throw conditioning_error("gram_M_k: condition " +
                             std::to_string(out.condition) +
                             " above guard");
  out.determinant = ev.prod();
  out.inv_diag.resize(size);
  for (int r = 0; r < size; ++r) {
    double acc = 0.0;
    for (int q = 0; q < size; ++q)
      acc += es.eigenvectors()(r, q) * es.eigenvectors()(r, q) / ev(q);
    out.inv_diag(r) = acc;
  }
  return out;
}

/// Simple (geometrically simple) case: one observation per eigenvalue.
inline GroupGram gram_M_k(const Eigen::VectorXd& lambdas,
                          const std::vector<ObservationVector>& obs,
                          double condition_guard = 1e12) {
  std::vector<std::vector<ObservationVector>> nested;
  nested.reserve(obs.size());
  for (const auto& o : obs) nested.push_back({o});
  return gram_M_k(lambdas, nested, condition_guard);
}

inline GroupGram gram_M_k(const Group& group, double condition_guard = 1e12) {
  Eigen::VectorXd lambdas(group.size());
  std::vector<ObservationVector> obs;
  obs.reserve(static_cast<std::size_t>(group.size()));
  for (int j = 1; j <= group.size(); ++j) {
    lambdas(j - 1) = group.lambda(j);
    obs.push_back(group.obs(j));
  }
  return gram_M_k(lambdas, obs, condition_guard);
}

} // namespace pmc
