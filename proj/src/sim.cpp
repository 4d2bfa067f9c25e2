#include "pmc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pmc {

namespace {

SimResult run_simulation(const SystemSpec& spec, const ModeCoeffs& y0,
                         const ControlField* control, double T, double N_sim) {
  if (!(T > 0.0)) throw contract_error("simulate_forward: T must be > 0");
  if (control && control->kind != spec.kind)
    throw contract_error("simulate_forward: control built for another system");
  if (control && std::abs(control->T - T) > 1e-14)
    throw contract_error("simulate_forward: control horizon mismatch");
  if (control && !(N_sim >= control->N))
    throw contract_error("simulate_forward: N_sim below control truncation");

  // The simulation frame; reuse the control's when truncations agree.
  std::shared_ptr<const SystemFrame> frame;
  if (control && control->frame &&
      control->frame->grouped.group_count() >= static_cast<int>(std::floor(N_sim)))
    frame = control->frame;
  else
    frame = std::make_shared<SystemFrame>(build_system_frame(spec, N_sim));

  const TensorModeSet sim_modes =
      tensorize(frame->transverse, frame->grouped, N_sim, spec.vartheta);

  std::set<ModeKey> retained_keys;
  Eigen::VectorXd w;          // control weights over its primal modes
  int n_ctrl = 0;
  if (control) {
    w = control->primal_weights();
    n_ctrl = control->primal.size();
    for (int p = 0; p < n_ctrl; ++p)
      retained_keys.insert(control->frame->key_of(control->primal, p));
  }

  SimResult result;
  result.T = T;
  result.N_sim = N_sim;
  result.entries.reserve(sim_modes.modes.size());

  double retained_sq = 0.0, tail_sq = 0.0, hm1_sq = 0.0;
  for (const TensorMode& mode : sim_modes.modes) {
    const Group& group = frame->grouped.group(mode.k);
    const SpectralPoint& point =
        group.members.at(static_cast<std::size_t>(mode.j - 1));
    SimEntry entry;
    entry.key = ModeKey{mode.m, point.family, point.index};
    entry.lambda = mode.lambda;
    const auto it = y0.find(entry.key);
    entry.c0 = it == y0.end() ? 0.0 : it->second;
    entry.free_decay = std::exp(-mode.lambda * T) * entry.c0;
    entry.retained = retained_keys.count(entry.key) > 0;

    double forcing = 0.0;
    if (control && n_ctrl > 0) {
      // Forcing factor of this mode times the closed-form source integrals.
      double factor = 0.0;
      switch (spec.kind) {
        case SystemSpec::Kind::dolecki:
          factor = std::sqrt(2.0 / pi) * std::sin(point.index * spec.x0);
          break;
        case SystemSpec::Kind::boundary:
          factor = (point.family == 1 ? spec.b1 : spec.b2) /
                   frame->phi_norm(point.family, point.index);
          break;
        case SystemSpec::Kind::internal:
          factor = (point.family == 1 ? spec.b1 : spec.b2) /
                   frame->phi_norm(point.family, point.index);
          break;
      }
      for (int p = 0; p < n_ctrl; ++p) {
        if (w(p) == 0.0) continue;
        const TensorMode& cm = control->primal.mode(p);
        const double kernel =
            exp_time_inner(mode.lambda, cm.lambda, T) *
            frame->transverse.psi_overlap(cm.m, mode.m, control->omega);
        double coupling;
        if (spec.kind == SystemSpec::Kind::internal)
          coupling = u2_inner(control->primal.obs(p), point.obs);
        else
          coupling = control->primal.obs(p).scalar;
        forcing += w(p) * kernel * coupling;
      }
      forcing *= factor;
    }
    entry.forcing = forcing;
    entry.c_final = entry.free_decay + entry.forcing;

    if (entry.retained)
      retained_sq += entry.c_final * entry.c_final;
    else
      tail_sq += entry.c_final * entry.c_final;
    hm1_sq += entry.c_final * entry.c_final / entry.lambda;
    result.retained_max_abs =
        entry.retained ? std::max(result.retained_max_abs, std::abs(entry.c_final))
                       : result.retained_max_abs;
    result.entries.push_back(entry);
  }
  result.retained_norm = std::sqrt(retained_sq);
  result.tail_norm = std::sqrt(tail_sq);
  result.l2_norm = std::sqrt(retained_sq + tail_sq);
  result.hminus1 = std::sqrt(hm1_sq);
  return result;
}

} // namespace

SimResult simulate_forward(const SystemSpec& spec, const ModeCoeffs& y0,
                           const ControlField& control, double T, double N_sim) {
  return run_simulation(spec, y0, &control, T, N_sim);
}

SimResult simulate_forward(const SystemSpec& spec, const ModeCoeffs& y0,
                           double T, double N_sim) {
  return run_simulation(spec, y0, nullptr, T, N_sim);
}

double hminus1_norm(const SimResult& result) {
  double acc = 0.0;
  for (const SimEntry& entry : result.entries) {
    if (!(entry.lambda > 0.0))
      throw contract_error("hminus1_norm: entry without positive eigenvalue");
    acc += entry.c_final * entry.c_final / entry.lambda;
  }
  return std::sqrt(acc);
}

} // namespace pmc
