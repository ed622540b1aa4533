#pragma once

#include <functional>
#include <variant>

#include "tpk/fourier.hpp"
#include "tpk/points.hpp"

namespace tpk {

/// Discrete Fourier coefficients of the coordinate functions, indexed by signed k.
class CurveSpectrum {
 public:
  explicit CurveSpectrum(Coefficients raw) : raw_(std::move(raw)) {}

  int size() const { return static_cast<int>(raw_.rows()); }
  int dim() const { return static_cast<int>(raw_.cols()); }
  /// Coefficient of e^{2 pi i k u} for |k| <= n/2. For even n the Nyquist bin is split
  /// evenly between +n/2 and -n/2.
  Eigen::VectorXcd coefficient(int k) const;
  const Coefficients& raw() const { return raw_; }
  Points inverse() const { return inverse_coefficients(raw_); }

 private:
  Coefficients raw_;
};

/// Closed curve sampled at u_j = j/n on R/Z. Immutable; derivatives and spectrum are
/// computed once at construction.
class ClosedCurve {
 public:
  explicit ClosedCurve(Points samples, DerivativeRule rule = DerivativeRule::spectral);

  int dim() const { return static_cast<int>(samples_.cols()); }
  int size() const { return static_cast<int>(samples_.rows()); }
  DerivativeRule rule() const { return rule_; }
  const Points& samples() const { return samples_; }
  const Points& first() const { return first_; }
  const Points& second() const { return second_; }
  /// |gamma'(u_j)|
  const Eigen::VectorXd& speed() const { return speed_; }
  const CurveSpectrum& spectrum() const { return spectrum_; }
  /// Trapezoid integral of the speed (spectral), or the polygon perimeter (central differences).
  double length() const { return length_; }
  /// max_j | |gamma'_j| / mean - 1 |
  double speed_deviation() const;

 private:
  Points samples_;
  DerivativeRule rule_;
  Points first_;
  Points second_;
  Eigen::VectorXd speed_;
  CurveSpectrum spectrum_;
  double length_ = 0.0;
};

struct Circle {
  double radius = 1.0;
};
struct Ellipse {
  double a = 2.0;
  double b = 1.0;
};
/// Wraps a times around the core circle and b times through the hole.
struct TorusKnot {
  int a = 2;
  int b = 3;
  double major = 2.0;
  double minor = 1.0;
};
/// Radial perturbation r(t) = 1 + amplitude cos(mode t).
struct PerturbedCircle {
  double amplitude = 0.05;
  int mode = 5;
};
/// Closed polygon through the given vertices, sampled uniformly along its perimeter.
struct Polygon {
  Points vertices;
};

/// (cos t, sin t cos t, offset sin t): a figure eight whose two strands pass at distance
/// 2 offset over the crossing. Needs dim >= 3.
struct FigureEight {
  double offset = 0.1;
};

using Primitive = std::variant<Circle, Ellipse, TorusKnot, PerturbedCircle, Polygon, FigureEight>;

ClosedCurve make_primitive(const Primitive& kind, int n_samples, int dim = 2);

/// Samples f at u_j = j/n.
ClosedCurve from_function(const std::function<Eigen::VectorXd(double)>& f, int n_samples,
                          DerivativeRule rule = DerivativeRule::spectral);

/// Resamples to n_out points equally spaced in arc length (uniform speed). The sample at
/// u = 0 is kept. Spectral curves use the trigonometric interpolant, central-difference
/// curves a periodic cubic spline.
ClosedCurve resample_arclength(const ClosedCurve& curve, int n_out);

/// Same parametrization, n_out uniform parameter samples of the interpolant.
ClosedCurve resample_uniform(const ClosedCurve& curve, int n_out);

/// Every factor-th sample.
ClosedCurve subsample(const ClosedCurve& curve, int factor);

/// x -> scale * x + translation.
ClosedCurve transform(const ClosedCurve& curve, double scale, const Eigen::VectorXd& translation);
ClosedCurve transform(const ClosedCurve& curve, double scale);
/// x -> rotation * x.
ClosedCurve rotate(const ClosedCurve& curve, const Eigen::MatrixXd& rotation);

inline double length(const ClosedCurve& curve) { return curve.length(); }

}  // namespace tpk
