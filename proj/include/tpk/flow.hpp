#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpk/curve.hpp"
#include "tpk/energy.hpp"
#include "tpk/spectral.hpp"

namespace tpk {

struct FlowConfig {
  EnergyParams params{4.5, 2.0};
  int max_iters = 500;
  /// First trial step is chosen so the largest node displacement equals step0.
  double step0 = 1e-2;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  bool precondition = false;
  /// Multiplier table size for the preconditioner; 0 means n/2.
  int k_max = 0;
  double min_distance_guard = 1e-3;
  int resample_every = 10;
  double tol_grad = 1e-6;
  double lambda_floor = 1e-3;

  void validate() const;
};

struct FlowState {
  int iter = 0;
  ClosedCurve curve;
  double energy = 0.0;
  /// L^2 norm of the normal part of g + lambda l, projected orthogonally to l. Tangential
  /// components only reparametrize and are left out.
  double grad_norm = 0.0;
  double lambda = 0.0;
  double min_dist = 0.0;
  double bilip = 0.0;
  double last_step = 0.0;
  Points gradient;         // raw discrete gradient
  Points length_gradient;  // L^2 gradient of length
};

/// lambda = -<g, l> / <l, l>, l the length gradient. Throws DegenerateCurveError if l = 0.
double lagrange_multiplier(const Points& gradient, const Points& length_grad);
double lagrange_multiplier(const Points& gradient, const ClosedCurve& curve);

/// Arc-length resampled, length 1 about the centroid, with energy and gradients evaluated.
/// Throws DomainError if the min-distance guard already fails.
FlowState initial_state(const ClosedCurve& curve, const FlowConfig& config);

/// One accepted descent step with Armijo backtracking on the length-normalized energy.
/// Throws StallError when the step drops below 1e-14.
FlowState flow_step(const FlowState& state, const FlowConfig& config);

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double length = 0.0;
  double grad_norm = 0.0;
  double lambda = 0.0;
  double min_dist = 0.0;
  double bilip = 0.0;
  double step = 0.0;
};

struct FlowTrace {
  std::vector<TraceRow> rows;  // row 0 is the initial state
  std::string stop_reason;     // "tol_grad", "max_iters" or "stall"
  std::optional<FlowState> final_state;
};

/// Callback after each accepted step (for snapshots).
using FlowObserver = std::function<void(const FlowState&)>;

FlowTrace run_flow(const ClosedCurve& curve, const FlowConfig& config, const FlowObserver& observer = {});

/// Sum of |c_k|^2 over |k| not in {0, 1} of the arc-length resampled, unit-length curve.
double non_round_energy(const ClosedCurve& curve);

}  // namespace tpk
