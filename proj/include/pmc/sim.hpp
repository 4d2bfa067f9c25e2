#pragma once

#include <Eigen/Dense>

#include <vector>

#include "pmc/control.hpp"

namespace pmc {

/// Final-state coefficients of one simulated mode in the L2-orthonormal
/// eigenbasis, split into free decay and control forcing.
struct SimEntry {
  ModeKey key;
  double lambda = 0.0;
  double c0 = 0.0;
  double free_decay = 0.0; // e^{-lambda T} c0
  double forcing = 0.0;    // closed-form control contribution
  double c_final = 0.0;    // free_decay + forcing
  bool retained = false;   // mode targeted by the control truncation
};

struct SimResult {
  std::vector<SimEntry> entries;
  double T = 0.0;
  double N_sim = 0.0;
  double retained_max_abs = 0.0;
  double retained_norm = 0.0; // l2 over retained coefficients
  double tail_norm = 0.0;     // l2 over the remaining coefficients
  double l2_norm = 0.0;
  double hminus1 = 0.0;
};

/// Exact spectral forward simulation of the controlled system: per mode,
/// c(T) = e^{-lambda T} c(0) + int_0^T e^{-lambda (T-t)} <B u(t), Phi> dt,
/// with the source inner products evaluated in closed form.
SimResult simulate_forward(const SystemSpec& spec, const ModeCoeffs& y0,
                           const ControlField& control, double T, double N_sim);

/// Free decay (no control).
SimResult simulate_forward(const SystemSpec& spec, const ModeCoeffs& y0,
                           double T, double N_sim);

/// sqrt(sum c^2 / lambda) over all simulated modes.
double hminus1_norm(const SimResult& result);

} // namespace pmc
