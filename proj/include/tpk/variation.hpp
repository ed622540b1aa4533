#pragma once

#include "tpk/curve.hpp"
#include "tpk/energy.hpp"

namespace tpk {

/// A direction h sampled on the curve's grid.
using VariationField = Points;

/// Largest allowed speed deviation for the arc-length formula.
inline constexpr double arclength_tolerance = 1e-6;

bool is_arclength(const ClosedCurve& curve, double tol = arclength_tolerance);

/// First variation at a uniform-speed curve by the arc-length formula. A curve of length
/// L != 1 is rescaled to unit length and the result multiplied by L^{q+2-p}.
/// Throws DomainError when the curve is not uniform speed.
double first_variation_arclength(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                                 const QuadratureSpec& quad = {});

/// First variation for any regular parametrization. h' uses the curve's derivative rule,
/// so this is the exact directional derivative of tp_energy. Throws RegularityError when
/// min |gamma'| < 1e-8.
double first_variation_general(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                               const QuadratureSpec& quad = {});

/// n times the partial derivatives of the discrete energy, so the trapezoid inner product
/// with h gives the directional derivative.
struct DiscreteGradient {
  Points values;
  double energy = 0.0;
};

/// Plain diagonal-excluded rule on the curve's own grid.
DiscreteGradient discrete_gradient(const ClosedCurve& curve, const EnergyParams& params);

/// L^2 gradient density of length(); for spectral curves this is -D(gamma'/|gamma'|).
Points length_gradient(const ClosedCurve& curve);

}  // namespace tpk
