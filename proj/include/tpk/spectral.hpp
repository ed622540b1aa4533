#pragma once

#include <vector>

#include "tpk/curve.hpp"
#include "tpk/energy.hpp"
#include "tpk/variation.hpp"

namespace tpk {

/// 2 - 2cos x - 2x sin x + x^2, with a Taylor branch for |x| < 1.
double F_function(double x);

/// rho_k = 2 (2 pi |k|)^{p-1} int_0^{|k| pi} F(x) x^{-p} dx for p in (3, 5).
double rho(int k, double p);

struct AsymptoticConstant {
  double value = 0.0;
  double error_bound = 0.0;  // certified bound on the truncated tail
};

/// lim rho_k |k|^{1-p} = 2 (2 pi)^{p-1} int_0^inf F(x) x^{-p} dx.
AsymptoticConstant asymptotic_constant(double p);

/// rho_k for 0 <= k <= k_max, built once and shared read-only.
class MultiplierTable {
 public:
  static MultiplierTable build(double p, int k_max);

  double p() const { return p_; }
  int k_max() const { return static_cast<int>(rho_.size()) - 1; }
  /// rho_{|k|}; throws DomainError beyond k_max.
  double rho(int k) const;
  const std::vector<double>& values() const { return rho_; }
  const AsymptoticConstant& asymptotic() const { return asymptotic_; }

 private:
  double p_ = 0.0;
  std::vector<double> rho_;
  AsymptoticConstant asymptotic_;
};

/// Double trapezoid sum of <df - w f'(u), dg - w g'(u)> / |w|^p over w = m/n, m != 0.
/// The integrand is not periodic in w, so w = 1/2 is split evenly between +1/2 and -1/2.
/// Richardson uses the error exponents 5-p, 2, 7-p, 4, ...
double Q_direct(const Points& f, const Points& g, double p, const QuadratureSpec& quad = {},
                DerivativeRule rule = DerivativeRule::spectral);

/// sum_k rho_k Re<f_k, g_k>. Throws DomainError if f or g has content above the table's k_max.
double Q_multiplier(const Points& f, const Points& g, const MultiplierTable& table);

/// R = dTP - 2Q evaluated from its own four-term integrand (q = 2, uniform speed curve).
/// Lengths are handled as in first_variation_arclength.
double remainder_term(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                      const QuadratureSpec& quad = {});

struct Decomposition {
  double variation = 0.0;  // dTP
  double bilinear = 0.0;   // Q, on the unit-length rescaling
  double remainder = 0.0;  // R
};

/// All three pieces on the same nodes and the same scaling.
Decomposition decompose(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                        const QuadratureSpec& quad = {});

/// Multiplies mode k by |2 pi k|^{2s}; the mean is mapped to 0.
Points fractional_laplacian(const Points& f, double s);

/// 2 rho_k + lambda (2 pi k)^2, and 0 for k = 0.
double el_multiplier(int k, double p, double lambda);
double el_multiplier(int k, const MultiplierTable& table, double lambda);

}  // namespace tpk
