#include "tpk/flow.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "tpk/analysis.hpp"
#include "tpk/error.hpp"
#include "tpk/variation.hpp"

namespace tpk {
namespace {

constexpr double min_displacement = 1e-14;

// length 1, centroid kept
ClosedCurve normalize(const Points& x, DerivativeRule rule) {
  ClosedCurve raw(x, rule);
  const double len = raw.length();
  if (!(len > 0.0)) throw DegenerateCurveError("flow: zero length");
  Eigen::RowVectorXd centroid = x.colwise().mean();
  Points out = x;
  out.rowwise() -= centroid;
  out /= len;
  out.rowwise() += centroid;
  return ClosedCurve(std::move(out), rule);
}

std::shared_ptr<const MultiplierTable> shared_table(double p, int k_max) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, std::shared_ptr<const MultiplierTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{p, k_max}];
  if (!slot) slot = std::make_shared<const MultiplierTable>(MultiplierTable::build(p, k_max));
  return slot;
}

// Tangential motion only reparametrizes the curve, but it changes the discrete sum, and
// following it drifts the sampling away from uniform. Keeps the normal part of f and
// restores orthogonality to the length gradient l.
Points normal_part(const Points& f, const ClosedCurve& curve, const Points& l) {
  Points out = f;
  for (int j = 0; j < curve.size(); ++j) {
    Eigen::RowVectorXd tangent = curve.first().row(j) / curve.speed()[j];
    out.row(j) -= out.row(j).dot(tangent) * tangent;
  }
  out -= (l2_inner(out, l) / l2_inner(l, l)) * l;
  return out;
}

FlowState evaluate(const ClosedCurve& curve, const FlowConfig& config, int iter, double step) {
  DiscreteGradient g = discrete_gradient(curve, config.params);
  Points l = length_gradient(curve);
  double lambda = lagrange_multiplier(g.values, l);
  FlowState s{iter, curve};
  s.energy = tp_energy(curve, config.params);
  s.grad_norm = l2_norm(normal_part(g.values + lambda * l, curve, l));
  s.lambda = lambda;
  s.min_dist = min_strand_distance(curve);
  s.bilip = bilipschitz_constant(curve).constant;
  s.last_step = step;
  s.gradient = std::move(g.values);
  s.length_gradient = std::move(l);
  return s;
}

// Sufficient decrease and guard check; nullopt if the candidate is rejected.
std::optional<double> try_candidate(const ClosedCurve& cand, const FlowState& state, const FlowConfig& config,
                                    double t, double slope) {
  if (!(min_strand_distance(cand) > config.min_distance_guard)) return std::nullopt;
  double e;
  try {
    e = tp_energy(cand, config.params);
  } catch (const SelfIntersectionError&) {
    return std::nullopt;
  }
  if (!(e <= state.energy + config.armijo_c * t * slope)) return std::nullopt;
  return e;
}

}  // namespace

void FlowConfig::validate() const {
  if (max_iters < 0) throw DomainError("flow: max_iters must be nonnegative");
  if (!(step0 > 0.0)) throw DomainError("flow: step0 must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw DomainError("flow: armijo_c must lie in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("flow: shrink must lie in (0, 1)");
  if (k_max < 0) throw DomainError("flow: k_max must be nonnegative");
  if (!(min_distance_guard > 0.0)) throw DomainError("flow: min_distance_guard must be positive");
  if (resample_every < 1) throw DomainError("flow: resample_every must be positive");
  if (!(tol_grad > 0.0)) throw DomainError("flow: tol_grad must be positive");
  if (!(lambda_floor > 0.0)) throw DomainError("flow: lambda_floor must be positive");
  if (precondition && params.q() != 2.0) throw DomainError("flow: preconditioning needs q = 2");
  if (precondition && !(params.p() > 3.0 && params.p() < 5.0))
    throw DomainError("flow: preconditioning needs p in (3, 5)");
}

double lagrange_multiplier(const Points& gradient, const Points& length_grad) {
  double ll = l2_inner(length_grad, length_grad);
  if (!(ll > 0.0)) throw DegenerateCurveError("lagrange_multiplier: length gradient vanishes");
  return -l2_inner(gradient, length_grad) / ll;
}

double lagrange_multiplier(const Points& gradient, const ClosedCurve& curve) {
  return lagrange_multiplier(gradient, length_gradient(curve));
}

FlowState initial_state(const ClosedCurve& curve, const FlowConfig& config) {
  config.validate();
  ClosedCurve start = normalize(resample_arclength(curve, curve.size()).samples(), curve.rule());
  double guard = min_strand_distance(start);
  if (!(guard > config.min_distance_guard))
    throw DomainError("flow: input violates the min-distance guard (" + std::to_string(guard) + ")");
  return evaluate(start, config, 0, 0.0);
}

FlowState flow_step(const FlowState& state, const FlowConfig& config) {
  const ClosedCurve& curve = state.curve;
  const int n = curve.size();
  const Points& g = state.gradient;
  const Points& l = state.length_gradient;
  Points d;
  if (config.precondition) {
    auto table = shared_table(config.params.p(), std::max(config.k_max, n / 2));
    const double lam = std::max(state.lambda, config.lambda_floor);
    auto inverse = [&](const Points& f) {
      return apply_even_symbol(f, [&](int k) { return k == 0 ? 0.0 : 1.0 / el_multiplier(k, *table, lam); });
    };
    Points a = inverse(g), b = inverse(l);
    double lb = l2_inner(l, b);
    if (!(lb > 0.0)) throw DegenerateCurveError("flow: preconditioned length gradient vanishes");
    // multiplier chosen so that d stays orthogonal to the length gradient
    double lambda_p = -l2_inner(l, a) / lb;
    d = -(a + lambda_p * b);
  } else {
    d = -(g + state.lambda * l);
  }
  d = normal_part(d, curve, l);
  const double slope = l2_inner(g, d);
  const double dmax = d.cwiseAbs().maxCoeff();
  if (!(slope < 0.0) || !(dmax > 0.0))
    throw StallError("flow: no descent direction (slope " + std::to_string(slope) + ")");

  double disp = state.last_step > 0.0 ? 2.0 * state.last_step : config.step0;
  disp = std::min(disp, 0.05);
  const bool resample_now = (state.iter + 1) % config.resample_every == 0;
  while (disp >= min_displacement) {
    const double t = disp / dmax;
    ClosedCurve moved = normalize(curve.samples() + t * d, curve.rule());
    if (resample_now) {
      ClosedCurve res = normalize(resample_arclength(moved, n).samples(), curve.rule());
      if (try_candidate(res, state, config, t, slope)) return evaluate(res, config, state.iter + 1, disp);
    }
    if (try_candidate(moved, state, config, t, slope)) return evaluate(moved, config, state.iter + 1, disp);
    disp *= config.shrink;
  }
  throw StallError("flow: step underflow at iteration " + std::to_string(state.iter) + ", grad_norm " +
                   std::to_string(state.grad_norm) + ", energy " + std::to_string(state.energy));
}

FlowTrace run_flow(const ClosedCurve& curve, const FlowConfig& config, const FlowObserver& observer) {
  FlowTrace trace;
  FlowState state = initial_state(curve, config);
  auto record = [&](const FlowState& s) {
    trace.rows.push_back({s.iter, s.energy, s.curve.length(), s.grad_norm, s.lambda, s.min_dist, s.bilip,
                          s.last_step});
  };
  record(state);
  trace.stop_reason = "max_iters";
  while (true) {
    if (state.grad_norm < config.tol_grad) {
      trace.stop_reason = "tol_grad";
      break;
    }
    if (state.iter >= config.max_iters) break;
    try {
      state = flow_step(state, config);
    } catch (const StallError&) {
      trace.stop_reason = "stall";
      break;
    }
    record(state);
    if (observer) observer(state);
  }
  trace.final_state = std::move(state);
  return trace;
}

double non_round_energy(const ClosedCurve& curve) {
  ClosedCurve c = normalize(resample_arclength(curve, curve.size()).samples(), curve.rule());
  const CurveSpectrum& spec = c.spectrum();
  double sum = 0.0;
  for (int k = 2; 2 * k <= c.size(); ++k) sum += spec.coefficient(k).squaredNorm() + spec.coefficient(-k).squaredNorm();
  return sum;
}

}  // namespace tpk
