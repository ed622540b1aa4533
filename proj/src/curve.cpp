#include "tpk/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "tpk/error.hpp"

namespace tpk {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void validate_samples(const Points& s) {
  if (s.cols() < 2) throw DomainError("curve: dim must be at least 2");
  if (s.rows() < 8) throw DomainError("curve: need at least 8 samples, got " + std::to_string(s.rows()));
  if (!s.allFinite()) throw DomainError("curve: non-finite sample coordinate");
}

Points pad_columns(const Points& p, int dim) {
  if (p.cols() > dim) throw DomainError("curve: primitive does not fit in the requested dim");
  Points out = Points::Zero(p.rows(), dim);
  out.leftCols(p.cols()) = p;
  return out;
}

// Cumulative arc length s(u) of a spectral curve, from a band-limited speed.
class SpectralArcLength {
 public:
  SpectralArcLength(const ClosedCurve& curve, int fine) : m_(fine) {
    const Coefficients& c = curve.spectrum().raw();
    const int n = curve.size();
    const int d = curve.dim();
    Coefficients dc = Coefficients::Zero(m_, d);
    for (int j = 0; j < n; ++j) {
      int k = signed_wavenumber(j, n);
      std::complex<double> ik(0.0, two_pi * k);
      if (2 * k == n) {
        // split Nyquist so its derivative is real
        dc.row(k) += 0.5 * ik * c.row(j);
        dc.row(m_ - k) += -0.5 * ik * c.row(j);
      } else {
        dc.row((k + m_) % m_) = ik * c.row(j);
      }
    }
    Points velocity = inverse_coefficients(dc);
    Points speed(m_, 1);
    speed.col(0) = velocity.rowwise().norm();
    Coefficients sc = forward_coefficients(speed);
    total_ = sc(0, 0).real();
    half_ = (m_ - 1) / 2;
    speed_coeffs_.resize(half_ + 1);
    for (int k = 0; k <= half_; ++k) speed_coeffs_[k] = sc(k, 0);

    Coefficients anti = Coefficients::Zero(m_, 1);
    for (int k = 1; k <= half_; ++k) {
      anti(k, 0) = sc(k, 0) / std::complex<double>(0.0, two_pi * k);
      anti(m_ - k, 0) = std::conj(anti(k, 0));
    }
    Points a = inverse_coefficients(anti);
    offset_ = a(0, 0);
    nodes_.resize(m_ + 1);
    for (int j = 0; j < m_; ++j) nodes_[j] = total_ * j / m_ + a(j, 0) - offset_;
    nodes_[m_] = total_;
  }

  double total() const { return total_; }

  // Parameter u in [0,1) with s(u) = target.
  double invert(double target) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), target);
    int j = std::clamp(static_cast<int>(it - nodes_.begin()) - 1, 0, m_ - 1);
    double s0 = nodes_[j], s1 = nodes_[j + 1];
    double u = (j + (s1 > s0 ? (target - s0) / (s1 - s0) : 0.0)) / m_;
    for (int iter = 0; iter < 30; ++iter) {
      auto [s, ds] = evaluate(u);
      if (ds <= 0.0) throw DegenerateCurveError("resample_arclength: vanishing speed");
      double du = (s - target) / ds;
      u -= du;
      if (std::abs(du) < 1e-16) break;
    }
    return u;
  }

 private:
  std::pair<double, double> evaluate(double u) const {
    double s = total_ * u - offset_;
    double ds = speed_coeffs_[0].real();
    const std::complex<double> step = std::polar(1.0, two_pi * u);
    std::complex<double> phase = 1.0;
    for (int k = 1; k <= half_; ++k) {
      phase *= step;
      std::complex<double> sk = speed_coeffs_[k] * phase;
      ds += 2.0 * sk.real();
      s += 2.0 * (sk / std::complex<double>(0.0, two_pi * k)).real();
    }
    return {s, ds};
  }

  int m_;
  int half_ = 0;
  double total_ = 0.0;
  double offset_ = 0.0;
  std::vector<std::complex<double>> speed_coeffs_;
  std::vector<double> nodes_;
};

ClosedCurve resample_spline_arclength(const ClosedCurve& curve, int n_out) {
  using boost::math::quadrature::gauss;
  const int n = curve.size();
  PeriodicCubicSpline spline(curve.samples());
  auto speed = [&](double u) { return spline.derivative(u).norm(); };
  std::vector<double> cum(n + 1, 0.0);
  for (int j = 0; j < n; ++j)
    cum[j + 1] = cum[j] + gauss<double, 10>::integrate(speed, double(j) / n, double(j + 1) / n);
  const double total = cum[n];
  if (!(total > 0.0)) throw DegenerateCurveError("resample_arclength: zero length");
  Points out(n_out, curve.dim());
  for (int k = 0; k < n_out; ++k) {
    double target = total * k / n_out;
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    int j = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, n - 1);
    double a = double(j) / n, b = double(j + 1) / n;
    double u = a + (b - a) * (cum[j + 1] > cum[j] ? (target - cum[j]) / (cum[j + 1] - cum[j]) : 0.0);
    for (int iter = 0; iter < 30; ++iter) {
      double s = cum[j] + gauss<double, 10>::integrate(speed, a, u);
      double ds = speed(u);
      if (ds <= 0.0) break;
      double du = (s - target) / ds;
      u = std::clamp(u - du, a, b);
      if (std::abs(du) < 1e-16) break;
    }
    out.row(k) = spline.value(u).transpose();
  }
  return ClosedCurve(std::move(out), curve.rule());
}

}  // namespace

Eigen::VectorXcd CurveSpectrum::coefficient(int k) const {
  const int n = size();
  if (2 * std::abs(k) > n) throw DomainError("spectrum: wavenumber beyond n/2");
  if (2 * std::abs(k) == n) return 0.5 * raw_.row(n / 2).transpose();
  return raw_.row((k + n) % n).transpose();
}

ClosedCurve::ClosedCurve(Points samples, DerivativeRule rule)
    : samples_(std::move(samples)), rule_(rule), spectrum_(Coefficients()) {
  validate_samples(samples_);
  spectrum_ = CurveSpectrum(forward_coefficients(samples_));
  first_ = differentiate(samples_, rule_, 1);
  second_ = differentiate(samples_, rule_, 2);
  speed_ = first_.rowwise().norm();
  if (rule_ == DerivativeRule::spectral) {
    length_ = speed_.mean();
  } else {
    double sum = 0.0;
    for (int j = 0; j < size(); ++j) sum += (samples_.row((j + 1) % size()) - samples_.row(j)).norm();
    length_ = sum;
  }
}

double ClosedCurve::speed_deviation() const {
  double mean = speed_.mean();
  if (!(mean > 0.0)) return std::numeric_limits<double>::infinity();
  return (speed_.array() / mean - 1.0).abs().maxCoeff();
}

ClosedCurve from_function(const std::function<Eigen::VectorXd(double)>& f, int n_samples,
                          DerivativeRule rule) {
  if (n_samples < 8) throw DomainError("from_function: n_samples must be at least 8");
  Eigen::VectorXd first = f(0.0);
  Points s(n_samples, first.size());
  s.row(0) = first.transpose();
  for (int j = 1; j < n_samples; ++j) s.row(j) = f(double(j) / n_samples).transpose();
  return ClosedCurve(std::move(s), rule);
}

ClosedCurve make_primitive(const Primitive& kind, int n, int dim) {
  if (n < 8) throw DomainError("make_primitive: n_samples must be at least 8");
  if (dim < 2) throw DomainError("make_primitive: dim must be at least 2");
  Points s = Points::Zero(n, dim);
  auto angle = [n](int j) { return two_pi * j / n; };

  if (auto* c = std::get_if<Circle>(&kind)) {
    if (!(c->radius > 0.0)) throw DomainError("circle: radius must be positive");
    for (int j = 0; j < n; ++j) {
      s(j, 0) = c->radius * std::cos(angle(j));
      s(j, 1) = c->radius * std::sin(angle(j));
    }
  } else if (auto* e = std::get_if<Ellipse>(&kind)) {
    if (!(e->a > 0.0 && e->b > 0.0)) throw DomainError("ellipse: semi-axes must be positive");
    for (int j = 0; j < n; ++j) {
      s(j, 0) = e->a * std::cos(angle(j));
      s(j, 1) = e->b * std::sin(angle(j));
    }
  } else if (auto* t = std::get_if<TorusKnot>(&kind)) {
    if (dim < 3) throw DomainError("torus_knot: dim must be at least 3");
    if (t->a < 1 || t->b < 1) throw DomainError("torus_knot: winding numbers must be positive");
    if (std::gcd(t->a, t->b) != 1) throw DomainError("torus_knot: winding numbers must be coprime");
    if (!(t->minor > 0.0 && t->minor < t->major))
      throw DomainError("torus_knot: need 0 < minor < major");
    for (int j = 0; j < n; ++j) {
      double th = angle(j);
      double r = t->major + t->minor * std::cos(t->b * th);
      s(j, 0) = r * std::cos(t->a * th);
      s(j, 1) = r * std::sin(t->a * th);
      s(j, 2) = t->minor * std::sin(t->b * th);
    }
  } else if (auto* pc = std::get_if<PerturbedCircle>(&kind)) {
    if (!(std::abs(pc->amplitude) < 1.0))
      throw DomainError("perturbed_circle: |amplitude| must be below 1 (radius would vanish)");
    if (pc->mode < 0) throw DomainError("perturbed_circle: mode must be nonnegative");
    for (int j = 0; j < n; ++j) {
      double th = angle(j);
      double r = 1.0 + pc->amplitude * std::cos(pc->mode * th);
      s(j, 0) = r * std::cos(th);
      s(j, 1) = r * std::sin(th);
    }
  } else if (auto* f8 = std::get_if<FigureEight>(&kind)) {
    if (dim < 3) throw DomainError("figure_eight: dim must be at least 3");
    if (!(f8->offset > 0.0)) throw DomainError("figure_eight: offset must be positive");
    for (int j = 0; j < n; ++j) {
      double th = angle(j);
      s(j, 0) = std::cos(th);
      s(j, 1) = std::sin(th) * std::cos(th);
      s(j, 2) = f8->offset * std::sin(th);
    }
  } else {
    const Points& v = std::get<Polygon>(kind).vertices;
    const int m = static_cast<int>(v.rows());
    if (m < 3) throw DomainError("polygon: need at least 3 vertices");
    if (v.cols() > dim) throw DomainError("polygon: vertex dimension exceeds dim");
    if (!v.allFinite()) throw DomainError("polygon: non-finite vertex");
    std::vector<double> cum(m + 1, 0.0);
    for (int i = 0; i < m; ++i) cum[i + 1] = cum[i] + (v.row((i + 1) % m) - v.row(i)).norm();
    const double perimeter = cum[m];
    if (!(perimeter > 0.0)) throw DomainError("polygon: zero perimeter");
    Points p(n, v.cols());
    int edge = 0;
    for (int j = 0; j < n; ++j) {
      double target = perimeter * j / n;
      while (edge < m - 1 && cum[edge + 1] <= target) ++edge;
      double len = cum[edge + 1] - cum[edge];
      double t = len > 0.0 ? (target - cum[edge]) / len : 0.0;
      p.row(j) = (1.0 - t) * v.row(edge) + t * v.row((edge + 1) % m);
    }
    return ClosedCurve(pad_columns(p, dim), DerivativeRule::central_difference);
  }
  return ClosedCurve(std::move(s), DerivativeRule::spectral);
}

ClosedCurve resample_arclength(const ClosedCurve& curve, int n_out) {
  if (n_out < 8) throw DomainError("resample_arclength: n_out must be at least 8");
  if (!(curve.length() > 0.0)) throw DegenerateCurveError("resample_arclength: zero length");
  if (curve.rule() == DerivativeRule::central_difference) return resample_spline_arclength(curve, n_out);

  SpectralArcLength arc(curve, 4 * std::max(curve.size(), n_out));
  if (!(arc.total() > 0.0)) throw DegenerateCurveError("resample_arclength: zero length");
  TrigInterpolant interp(curve.samples());
  Points out(n_out, curve.dim());
  out.row(0) = curve.samples().row(0);
  for (int k = 1; k < n_out; ++k) {
    double u = arc.invert(arc.total() * k / n_out);
    out.row(k) = interp.value(u).transpose();
  }
  return ClosedCurve(std::move(out), curve.rule());
}

ClosedCurve resample_uniform(const ClosedCurve& curve, int n_out) {
  if (n_out < 8) throw DomainError("resample_uniform: n_out must be at least 8");
  Points out(n_out, curve.dim());
  if (curve.rule() == DerivativeRule::spectral) {
    TrigInterpolant interp(curve.samples());
    for (int k = 0; k < n_out; ++k) out.row(k) = interp.value(double(k) / n_out).transpose();
  } else {
    PeriodicCubicSpline spline(curve.samples());
    for (int k = 0; k < n_out; ++k) out.row(k) = spline.value(double(k) / n_out).transpose();
  }
  return ClosedCurve(std::move(out), curve.rule());
}

ClosedCurve subsample(const ClosedCurve& curve, int factor) {
  if (factor < 1 || curve.size() % factor != 0)
    throw DomainError("subsample: factor must divide the sample count");
  const int m = curve.size() / factor;
  Points out(m, curve.dim());
  for (int j = 0; j < m; ++j) out.row(j) = curve.samples().row(j * factor);
  return ClosedCurve(std::move(out), curve.rule());
}

ClosedCurve transform(const ClosedCurve& curve, double scale, const Eigen::VectorXd& translation) {
  if (scale == 0.0 || !std::isfinite(scale)) throw DomainError("transform: scale must be finite and nonzero");
  if (translation.size() != curve.dim()) throw DomainError("transform: translation has wrong dimension");
  Points out = scale * curve.samples();
  out.rowwise() += translation.transpose();
  return ClosedCurve(std::move(out), curve.rule());
}

ClosedCurve transform(const ClosedCurve& curve, double scale) {
  return transform(curve, scale, Eigen::VectorXd::Zero(curve.dim()));
}

ClosedCurve rotate(const ClosedCurve& curve, const Eigen::MatrixXd& rotation) {
  if (rotation.rows() != curve.dim() || rotation.cols() != curve.dim())
    throw DomainError("rotate: matrix size does not match dim");
  Points out = curve.samples() * rotation.transpose();
  return ClosedCurve(std::move(out), curve.rule());
}

}  // namespace tpk
