#pragma once

#include <vector>

#include "tpk/curve.hpp"
#include "tpk/energy.hpp"

namespace tpk {

/// [f]_{W^{s,rho}} = ( sum over u, w != 0 of |f(u+w) - f(u)|^rho / |w|^{1 + rho s} )^{1/rho}
/// on the diagonal-excluded grid. Richardson uses exponents rho(1-s), 2, rho(1-s)+2, ...
/// Throws DomainError unless 0 < s < 1 and rho >= 1.
double sobolev_seminorm(const Points& field, double s, double rho, const QuadratureSpec& quad = {});

struct BiLipschitz {
  double constant = 1.0;  // +inf if two samples coincide
  int i = 0;              // pair attaining the maximum
  int j = 0;
};

/// max over sample pairs of intrinsic distance / chord. The intrinsic distance is measured
/// along the curve (trapezoid rule on the speed, or the polygon for central differences),
/// so the value does not depend on scaling.
BiLipschitz bilipschitz_constant(const ClosedCurve& curve);

/// Same for an open polyline; intrinsic distance along the polyline.
BiLipschitz bilipschitz_constant_open(const Points& polyline);

/// Jones beta number: inf over lines G through x of sup_{y in B_r(x)} dist(y, G) / r, over
/// the curve samples. Throws DomainError if the ball holds fewer than two samples.
double beta_number(const ClosedCurve& curve, int x_index, double r);

struct BetaProfile {
  std::vector<double> radii;
  std::vector<double> sup_beta;  // sup over base points of beta(x, 2d)
  double fitted_exponent = 0.0;  // least-squares slope of log sup_beta against log d
  double kappa = 0.0;            // guaranteed decay exponent (p-q-2)/(q+4)
};

BetaProfile beta_profile(const ClosedCurve& curve, const EnergyParams& params, const std::vector<double>& radii);

/// max over sample pairs of |f(u) - f(v)| / |u - v|^alpha, periodic parameter distance.
double holder_estimate(const Points& field, double alpha);

/// min chord over pairs whose circular index separation exceeds n/16.
double min_strand_distance(const ClosedCurve& curve);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct PowerLawFit {
  double offset = 0.0;    // y0
  double coefficient = 0.0;  // c
  double exponent = 0.0;  // a
  double residual = 0.0;  // rms of the fit
};

/// Least-squares fit y = y0 + c x^a (Gauss-Newton on a, linear in y0 and c).
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tpk
