#pragma once

#include <span>
#include <string>
#include <vector>

#include "tpk/curve.hpp"

namespace tpk {

enum class Regime { non_repulsive, critical, subcritical, singular };

std::string to_string(Regime r);

/// Exponent pair (p, q) of the tangent-point energy. Derived quantities are recomputed
/// from (p, q) on every call.
class EnergyParams {
 public:
  EnergyParams(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }
  Regime regime() const;
  /// Energy of S*gamma is S^{q+2-p} times the energy of gamma.
  double scaling_power() const { return q_ + 2.0 - p_; }
  /// Decay exponent (p-q-2)/(q+4) of the beta numbers.
  double beta_decay() const { return (p_ - q_ - 2.0) / (q_ + 4.0); }
  /// Exponent 2q-p of the integrand near the diagonal.
  double diagonal_exponent() const { return 2.0 * q_ - p_; }

 private:
  double p_;
  double q_;
};

EnergyParams classify(double p, double q);

enum class QuadratureRule { trapezoid_diagonal_excluded, trapezoid_richardson };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::trapezoid_diagonal_excluded;
  /// Number of w-nodes; 0 means the curve's own sample count. A different value
  /// re-interpolates the curve onto that many uniform parameters.
  int n_offsets = 0;
  /// Correction terms for trapezoid_richardson; uses that many halvings of the grid.
  int richardson_terms = 1;
};

/// Double trapezoid sum of |P(dx - w x'(u))|^q / |dx|^p |x'(u)| |x'(u+w)| over u_i and
/// offsets w = m/n, m != 0. Throws SelfIntersectionError on coincident samples.
double tp_energy(const ClosedCurve& curve, const EnergyParams& params, const QuadratureSpec& quad = {});

/// Extrapolates values[l], computed at step h * 2^l, assuming
/// value(h) = limit + sum_k c_k h^{exponents[k]}. Needs exponents.size() + 1 values.
double richardson(std::span<const double> values, std::span<const double> exponents);

/// Keeps the first of any exponents closer than 0.05 and drops nonpositive ones.
std::vector<double> distinct_exponents(std::span<const double> exponents);

/// Points with unit tangents and quadrature weights; used for open arcs.
struct SampledArc {
  Points points;
  Points tangents;
  Eigen::VectorXd weights;
};

SampledArc to_arc(const ClosedCurve& curve);

/// Straight segment from a to b with composite Gauss-Legendre panels graded
/// geometrically toward the parameter `focus` in [0, 1].
SampledArc graded_segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double focus,
                          double finest = 1e-5, int order = 20);

/// sum_i sum_j w_i w_j |P_i(y_j - x_i)|^q / |y_j - x_i|^p with base points on `base`.
double cross_energy(const SampledArc& base, const SampledArc& target, const EnergyParams& params);

struct PairEnergy {
  double self_a = 0.0;
  double self_b = 0.0;
  double cross_ab = 0.0;
  double cross_ba = 0.0;
  double total = 0.0;
};

/// TP(a) + TP(b) plus both cross double sums. Symmetric in (a, b).
PairEnergy pair_energy(const ClosedCurve& a, const ClosedCurve& b, const EnergyParams& params,
                       const QuadratureSpec& quad = {});

struct ClassicalComparison {
  double lhs = 0.0;  // sum of r^{-q} with 2r = chord^2 / dist
  double rhs = 0.0;  // 2^q TP^{(2q, q)}
  double max_summand_deviation = 0.0;  // relative, over all off-diagonal nodes
};

ClassicalComparison classical_equivalence(const ClosedCurve& curve, double q_cls);

}  // namespace tpk
