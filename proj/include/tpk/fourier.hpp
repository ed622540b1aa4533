#pragma once

#include <complex>
#include <functional>

#include "tpk/points.hpp"

namespace tpk {

using Coefficients = Eigen::MatrixXcd;

/// Signed wavenumber of FFT bin `index` for length n, in (-n/2, n/2].
int signed_wavenumber(int index, int n);

/// Column-wise discrete Fourier coefficients, f_hat_k = (1/n) sum_j f_j e^{-2 pi i k j/n},
/// stored in FFT order (row k mod n).
Coefficients forward_coefficients(const Points& f);

/// Inverse of forward_coefficients; imaginary parts are discarded.
Points inverse_coefficients(const Coefficients& c);

/// Multiplies every mode by a real, even symbol m(k). The Nyquist bin uses k = n/2.
Points apply_even_symbol(const Points& f, const std::function<double(int)>& symbol);

/// Derivative of periodic samples on R/Z. order is 1 or 2.
/// Spectral first derivatives drop the Nyquist mode so the operator is skew-symmetric.
Points differentiate(const Points& f, DerivativeRule rule, int order = 1);

/// Transpose of the first-derivative operator (both rules are skew: D^T = -D).
Points differentiate_adjoint(const Points& f, DerivativeRule rule);

/// Trigonometric interpolant of uniformly spaced periodic samples.
/// The Nyquist mode (even n) is split evenly between +-n/2 so the interpolant is real.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Points& samples);

  int dim() const { return static_cast<int>(coeffs_.cols()); }
  Eigen::VectorXd value(double u) const;
  Eigen::VectorXd derivative(double u) const;

 private:
  Eigen::VectorXd evaluate(double u, bool derivative) const;
  int n_;
  Coefficients coeffs_;
};

/// C^2 periodic cubic spline through uniformly spaced samples (knots u_j = j/n).
class PeriodicCubicSpline {
 public:
  explicit PeriodicCubicSpline(const Points& samples);

  int size() const { return static_cast<int>(values_.rows()); }
  Eigen::VectorXd value(double u) const;
  Eigen::VectorXd derivative(double u) const;

 private:
  Points values_;
  Points moments_;  // second derivatives at the knots
};

}  // namespace tpk
