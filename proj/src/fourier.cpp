#include "tpk/fourier.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "tpk/error.hpp"

namespace tpk {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_unit(double u) {
  u -= std::floor(u);
  return u >= 1.0 ? 0.0 : u;
}

}  // namespace

int signed_wavenumber(int index, int n) { return 2 * index <= n ? index : index - n; }

Coefficients forward_coefficients(const Points& f) {
  const int n = static_cast<int>(f.rows());
  Coefficients out(n, f.cols());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(n), spec(n);
  for (int c = 0; c < f.cols(); ++c) {
    for (int j = 0; j < n; ++j) in[j] = f(j, c);
    fft.fwd(spec, in);
    for (int j = 0; j < n; ++j) out(j, c) = spec[j] / static_cast<double>(n);
  }
  return out;
}

Points inverse_coefficients(const Coefficients& c) {
  const int n = static_cast<int>(c.rows());
  Points out(n, c.cols());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec(n), val(n);
  for (int col = 0; col < c.cols(); ++col) {
    for (int j = 0; j < n; ++j) spec[j] = c(j, col) * static_cast<double>(n);
    fft.inv(val, spec);
    for (int j = 0; j < n; ++j) out(j, col) = val[j].real();
  }
  return out;
}

Points apply_even_symbol(const Points& f, const std::function<double(int)>& symbol) {
  Coefficients c = forward_coefficients(f);
  const int n = static_cast<int>(f.rows());
  for (int j = 0; j < n; ++j) {
    int k = signed_wavenumber(j, n);
    c.row(j) *= symbol(k);
  }
  return inverse_coefficients(c);
}

Points differentiate(const Points& f, DerivativeRule rule, int order) {
  if (order != 1 && order != 2) throw DomainError("differentiate: order must be 1 or 2");
  const int n = static_cast<int>(f.rows());
  if (rule == DerivativeRule::central_difference) {
    Points out(n, f.cols());
    const double dn = n;
    for (int j = 0; j < n; ++j) {
      int jp = (j + 1) % n, jm = (j + n - 1) % n;
      if (order == 1)
        out.row(j) = (f.row(jp) - f.row(jm)) * (0.5 * dn);
      else
        out.row(j) = (f.row(jp) - 2.0 * f.row(j) + f.row(jm)) * (dn * dn);
    }
    return out;
  }
  Coefficients c = forward_coefficients(f);
  for (int j = 0; j < n; ++j) {
    int k = signed_wavenumber(j, n);
    if (order == 1) {
      if (2 * k == n) {
        c.row(j).setZero();
      } else {
        c.row(j) *= std::complex<double>(0.0, two_pi * k);
      }
    } else {
      c.row(j) *= -(two_pi * k) * (two_pi * k);
    }
  }
  return inverse_coefficients(c);
}

Points differentiate_adjoint(const Points& f, DerivativeRule rule) {
  return -differentiate(f, rule, 1);
}

TrigInterpolant::TrigInterpolant(const Points& samples)
    : n_(static_cast<int>(samples.rows())), coeffs_(forward_coefficients(samples)) {}

Eigen::VectorXd TrigInterpolant::value(double u) const { return evaluate(u, false); }

Eigen::VectorXd TrigInterpolant::derivative(double u) const { return evaluate(u, true); }

Eigen::VectorXd TrigInterpolant::evaluate(double u, bool derivative) const {
  const int d = dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  if (!derivative) out = coeffs_.row(0).real().transpose();
  const std::complex<double> step = std::polar(1.0, two_pi * wrap_unit(u));
  std::complex<double> phase = 1.0;
  const int kmax = (n_ - 1) / 2;
  for (int k = 1; k <= kmax; ++k) {
    phase *= step;
    // Re(c_k e^{ik}) + Re(c_{-k} e^{-ik}) = 2 Re(c_k e^{ik}) for real data.
    std::complex<double> factor = derivative ? std::complex<double>(0.0, two_pi * k) * phase : phase;
    for (int c = 0; c < d; ++c) out[c] += 2.0 * (coeffs_(k, c) * factor).real();
  }
  if (n_ % 2 == 0) {
    const int k = n_ / 2;
    const double arg = two_pi * k * wrap_unit(u);
    for (int c = 0; c < d; ++c) {
      double a = coeffs_(k, c).real();
      out[c] += derivative ? -a * two_pi * k * std::sin(arg) : a * std::cos(arg);
    }
  }
  return out;
}

PeriodicCubicSpline::PeriodicCubicSpline(const Points& samples) : values_(samples) {
  const int n = static_cast<int>(samples.rows());
  const double dn = n;
  // Moment equations M_{j-1} + 4 M_j + M_{j+1} = 6 n^2 (y_{j+1} - 2 y_j + y_{j-1})
  // form a circulant system, diagonal in Fourier space.
  moments_ = apply_even_symbol(samples, [n, dn](int k) {
    double c = std::cos(two_pi * k / n);
    return 6.0 * dn * dn * (2.0 * c - 2.0) / (4.0 + 2.0 * c);
  });
}

Eigen::VectorXd PeriodicCubicSpline::value(double u) const {
  const int n = size();
  double x = wrap_unit(u) * n;
  int j = std::min(static_cast<int>(std::floor(x)), n - 1);
  double t = x - j;
  int jp = (j + 1) % n;
  double h = 1.0 / n;
  double s = 1.0 - t;
  return (s * values_.row(j) + t * values_.row(jp) +
          (h * h / 6.0) * ((s * s * s - s) * moments_.row(j) + (t * t * t - t) * moments_.row(jp)))
      .transpose();
}

Eigen::VectorXd PeriodicCubicSpline::derivative(double u) const {
  const int n = size();
  double x = wrap_unit(u) * n;
  int j = std::min(static_cast<int>(std::floor(x)), n - 1);
  double t = x - j;
  int jp = (j + 1) % n;
  double h = 1.0 / n;
  double s = 1.0 - t;
  return ((values_.row(jp) - values_.row(j)) / h +
          (h / 6.0) * ((1.0 - 3.0 * s * s) * moments_.row(j) + (3.0 * t * t - 1.0) * moments_.row(jp)))
      .transpose();
}

}  // namespace tpk
