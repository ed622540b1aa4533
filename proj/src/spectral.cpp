#include "tpk/spectral.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kernel.hpp"
#include "tpk/error.hpp"

namespace tpk {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr int tail_panels = 4096;

void check_p(double p) {
  if (!(p > 3.0 && p < 5.0)) throw DomainError("rho: p must lie in (3, 5)");
}

// Taylor coefficient of x^{2m} in F: (-1)^m 2 (2m - 1) / (2m)!, m >= 2.
double taylor_coefficient(int m) {
  double fact = 1.0;
  for (int i = 2; i <= 2 * m; ++i) fact *= i;
  return (m % 2 == 0 ? 2.0 : -2.0) * (2 * m - 1) / fact;
}

// int_0^eps F(x) x^{-p} dx from the series, eps <= 0.1.
double series_head(double eps, double p) {
  double sum = 0.0;
  for (int m = 2; m <= 12; ++m) {
    double e = 2 * m - p + 1.0;
    sum += taylor_coefficient(m) * std::pow(eps, e) / e;
  }
  return sum;
}

double panel(double a, double b, double p) {
  auto f = [p](double x) { return F_function(x) * std::pow(x, -p); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-15);
}

// Integrals of F(x) x^{-p} over [0, pi], [pi, 2 pi], ..., [(count-1) pi, count pi].
std::vector<double> panel_integrals(double p, int count) {
  std::vector<double> out(count, 0.0);
  parallel_for(count, [&](std::size_t m) {
    if (m == 0) {
      const double eps = 0.1;
      out[0] = series_head(eps, p) + panel(eps, pi, p);
    } else {
      out[m] = panel(m * pi, (m + 1) * pi, p);
    }
  });
  return out;
}

double rho_from_integral(int k, double p, double integral) {
  return 2.0 * std::pow(two_pi * std::abs(k), p - 1.0) * integral;
}

void check_fields(const Points& f, const Points& g) {
  if (f.rows() != g.rows() || f.cols() != g.cols()) throw DomainError("Q: fields must have the same shape");
  if (f.rows() < 8) throw DomainError("Q: need at least 8 samples");
  if (!f.allFinite() || !g.allFinite()) throw DomainError("Q: non-finite field entry");
}

double q_plain(const Points& f, const Points& g, double p, DerivativeRule rule) {
  const int n = static_cast<int>(f.rows()), d = static_cast<int>(f.cols());
  const Points df = differentiate(f, rule, 1);
  const Points dg = differentiate(g, rule, 1);
  double sum = detail::sum_rows(n, [&](int i) {
    auto term = [&](int j, double w) {
      double dot = 0.0;
      for (int k = 0; k < d; ++k)
        dot += (f(j, k) - f(i, k) - w * df(i, k)) * (g(j, k) - g(i, k) - w * dg(i, k));
      return dot * std::pow(std::abs(w), -p);
    };
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      if (2 * m == n)
        row += 0.5 * (term(j, 0.5) + term(j, -0.5));
      else
        row += term(j, detail::offset(m, n));
    }
    return row;
  });
  return sum / (double(n) * n);
}

Points subsample_rows(const Points& f, int factor) {
  Points out(f.rows() / factor, f.cols());
  for (int j = 0; j < out.rows(); ++j) out.row(j) = f.row(j * factor);
  return out;
}

Points resample_rows(const Points& f, int n_out) {
  TrigInterpolant interp(f);
  Points out(n_out, f.cols());
  for (int k = 0; k < n_out; ++k) out.row(k) = interp.value(double(k) / n_out).transpose();
  return out;
}

struct UnitLength {
  Points x, t, h, dh;
  double factor;
};

UnitLength unit_length(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                       const QuadratureSpec& quad) {
  if (params.q() != 2.0) throw DomainError("remainder_term: only q = 2 is supported");
  if (!(params.p() > 4.0 && params.p() < 5.0)) throw DomainError("remainder_term: p must lie in (4, 5)");
  if (quad.rule != QuadratureRule::trapezoid_diagonal_excluded)
    throw DomainError("remainder_term: only the plain diagonal-excluded rule is supported");
  if (!is_arclength(curve))
    throw DomainError("remainder_term: curve is not parametrized proportionally to arc length");
  if (h.rows() != curve.size() || h.cols() != curve.dim())
    throw DomainError("remainder_term: field must match the curve's samples");
  ClosedCurve c = curve;
  Points f = h;
  if (quad.n_offsets != 0 && quad.n_offsets != curve.size()) {
    if (quad.n_offsets % 2 != 0) throw DomainError("quadrature: n_offsets must be even");
    c = resample_uniform(curve, quad.n_offsets);
    if (curve.rule() != DerivativeRule::spectral) throw DomainError("remainder_term: n_offsets needs a spectral curve");
    f = resample_rows(h, quad.n_offsets);
  }
  const double len = c.length();
  if (!(len > 0.0)) throw DegenerateCurveError("remainder_term: zero length");
  UnitLength out;
  out.x = c.samples() / len;
  out.t = c.first() / len;
  out.h = f / len;
  out.dh = differentiate(out.h, c.rule(), 1);
  out.factor = std::pow(len, params.scaling_power());
  return out;
}

double remainder_kernel(const UnitLength& u, double p) {
  const int n = static_cast<int>(u.x.rows()), d = static_cast<int>(u.x.cols());
  const double tiny = detail::coincidence_sq(u.x);
  double sum = detail::sum_rows(n, [&](int i) {
    std::vector<double> b(d);
    double ti_dhi = 0.0;
    for (int k = 0; k < d; ++k) ti_dhi += u.t(i, k) * u.dh(i, k);
    auto term = [&](int j, double w) {
      double a2 = 0.0, c = 0.0, along = 0.0;
      for (int k = 0; k < d; ++k) {
        double delta = u.x(j, k) - u.x(i, k);
        a2 += delta * delta;
        c += delta * u.t(i, k);
        b[k] = delta - w * u.t(i, k);
        along += b[k] * u.t(i, k);
      }
      if (a2 <= tiny) throw SelfIntersectionError("remainder_term: coincident samples", i, j);
      double b2 = 0.0, num = 0.0, plain = 0.0, delta_dh = 0.0, tj_dhj = 0.0;
      for (int k = 0; k < d; ++k) {
        double shifted = b[k];
        b[k] -= along * u.t(i, k);
        b2 += b[k] * b[k];
        double delta = u.x(j, k) - u.x(i, k);
        double dhk = u.h(j, k) - u.h(i, k);
        num += b[k] * (dhk - c * u.dh(i, k));
        plain += shifted * (dhk - w * u.dh(i, k));
        delta_dh += delta * dhk;
        tj_dhj += u.t(j, k) * u.dh(j, k);
      }
      double ap = std::pow(a2, -0.5 * p);
      double wp = std::pow(std::abs(w), -p);
      double r1 = 2.0 * num * (ap - wp);
      double r2 = 2.0 * (num - plain) * wp;
      double r3 = -p * b2 * delta_dh * ap / a2;
      double r4 = b2 * ap * (ti_dhi + tj_dhj);
      return r1 + r2 + r3 + r4;
    };
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      if (2 * m == n)
        row += 0.5 * (term(j, 0.5) + term(j, -0.5));
      else
        row += term(j, detail::offset(m, n));
    }
    return row;
  });
  return sum / (double(n) * n);
}

}  // namespace

double F_function(double x) {
  // series sum_{m>=2} (-1)^m 2(2m-1) x^{2m} / (2m)!; the closed form loses up to
  // 1/x^4 digits near zero
  if (std::abs(x) < 1.0) {
    const double x2 = x * x;
    double term = -x2 / 2.0, sum = 0.0;  // (-1)^m x^{2m} / (2m)! at m = 1
    for (int m = 2; m <= 12; ++m) {
      term *= -x2 / ((2.0 * m - 1.0) * (2.0 * m));
      sum += 2.0 * (2.0 * m - 1.0) * term;
    }
    return sum;
  }
  return 2.0 - 2.0 * std::cos(x) - 2.0 * x * std::sin(x) + x * x;
}

double rho(int k, double p) {
  check_p(p);
  if (k == 0) return 0.0;
  const int kk = std::abs(k);
  std::vector<double> panels = panel_integrals(p, kk);
  double integral = 0.0;
  for (double v : panels) integral += v;
  return rho_from_integral(kk, p, integral);
}

AsymptoticConstant asymptotic_constant(double p) {
  check_p(p);
  std::vector<double> panels = panel_integrals(p, tail_panels);
  double integral = 0.0;
  for (double v : panels) integral += v;
  const double x = tail_panels * pi;
  // tail of x^{2-p} + 2 x^{-p} - 2 x^{1-p} sin x; what remains after two integrations
  // by parts is 2(p-2) int_X^inf x^{-p} cos x, bounded by 4(p-2) X^{-p}
  double tail = std::pow(x, 3.0 - p) / (p - 3.0) + 2.0 * std::pow(x, 1.0 - p) / (p - 1.0) -
                2.0 * std::cos(x) * std::pow(x, 1.0 - p);
  const double scale = 2.0 * std::pow(two_pi, p - 1.0);
  AsymptoticConstant out;
  out.value = scale * (integral + tail);
  out.error_bound = scale * 4.0 * (p - 2.0) * std::pow(x, -p);
  return out;
}

MultiplierTable MultiplierTable::build(double p, int k_max) {
  check_p(p);
  if (k_max < 1) throw DomainError("MultiplierTable: k_max must be at least 1");
  MultiplierTable t;
  t.p_ = p;
  std::vector<double> panels = panel_integrals(p, k_max);
  t.rho_.assign(k_max + 1, 0.0);
  double integral = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    integral += panels[k - 1];
    t.rho_[k] = rho_from_integral(k, p, integral);
  }
  t.asymptotic_ = asymptotic_constant(p);
  return t;
}

double MultiplierTable::rho(int k) const {
  int kk = std::abs(k);
  if (kk > k_max()) throw DomainError("MultiplierTable: wavenumber " + std::to_string(k) + " beyond k_max");
  return rho_[kk];
}

double Q_direct(const Points& f, const Points& g, double p, const QuadratureSpec& quad, DerivativeRule rule) {
  check_fields(f, g);
  if (!(p > 0.0 && p < 5.0)) throw DomainError("Q_direct: p must lie in (0, 5)");
  Points ff = f, gg = g;
  if (quad.n_offsets != 0 && quad.n_offsets != f.rows()) {
    if (quad.n_offsets % 2 != 0) throw DomainError("quadrature: n_offsets must be even");
    if (rule != DerivativeRule::spectral) throw DomainError("Q_direct: n_offsets needs spectral fields");
    ff = resample_rows(f, quad.n_offsets);
    gg = resample_rows(g, quad.n_offsets);
  }
  if (quad.rule == QuadratureRule::trapezoid_diagonal_excluded) return q_plain(ff, gg, p, rule);

  // singular part h^{5-p}, h^{7-p}, ...; the non-periodic endpoint adds h^2, h^4, ...
  std::vector<double> raw;
  for (int k = 0; static_cast<int>(raw.size()) < quad.richardson_terms; ++k) {
    raw.push_back(5.0 - p + 2.0 * k);
    if (static_cast<int>(raw.size()) < quad.richardson_terms) raw.push_back(2.0 + 2.0 * k);
  }
  std::vector<double> exps = distinct_exponents(raw);
  if (exps.empty()) throw DomainError("Q_direct: Richardson needs at least one term");
  const int levels = static_cast<int>(exps.size()) + 1;
  const int n = static_cast<int>(ff.rows());
  if (n % (1 << (levels - 1)) != 0 || n / (1 << (levels - 1)) < 8)
    throw DomainError("Q_direct: sample count too small or not divisible for Richardson levels");
  std::vector<double> values;
  for (int l = 0; l < levels; ++l) {
    if (l == 0)
      values.push_back(q_plain(ff, gg, p, rule));
    else
      values.push_back(q_plain(subsample_rows(ff, 1 << l), subsample_rows(gg, 1 << l), p, rule));
  }
  return richardson(values, exps);
}

double Q_multiplier(const Points& f, const Points& g, const MultiplierTable& table) {
  check_fields(f, g);
  const int n = static_cast<int>(f.rows());
  Coefficients cf = forward_coefficients(f), cg = forward_coefficients(g);
  double peak = std::max(cf.cwiseAbs().maxCoeff(), cg.cwiseAbs().maxCoeff());
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    int k = signed_wavenumber(j, n);
    if (k == 0) continue;
    double term = 0.0;
    for (int c = 0; c < f.cols(); ++c) term += (cf(j, c) * std::conj(cg(j, c))).real();
    if (std::abs(k) > table.k_max()) {
      double size = std::max(cf.row(j).cwiseAbs().maxCoeff(), cg.row(j).cwiseAbs().maxCoeff());
      if (size > 1e-12 * peak)
        throw DomainError("Q_multiplier: field has content at |k| = " + std::to_string(std::abs(k)) +
                          " beyond table k_max = " + std::to_string(table.k_max()));
      continue;
    }
    // the Nyquist bin is the sum of the +-n/2 halves
    if (2 * k == n) term *= 0.5;
    sum += table.rho(k) * term;
  }
  return sum;
}

double remainder_term(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                      const QuadratureSpec& quad) {
  UnitLength u = unit_length(curve, h, params, quad);
  return u.factor * remainder_kernel(u, params.p());
}

Decomposition decompose(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                        const QuadratureSpec& quad) {
  UnitLength u = unit_length(curve, h, params, quad);
  Decomposition out;
  out.variation = first_variation_arclength(curve, h, params, quad);
  out.bilinear = u.factor * q_plain(u.x, u.h, params.p(), curve.rule());
  out.remainder = u.factor * remainder_kernel(u, params.p());
  return out;
}

Points fractional_laplacian(const Points& f, double s) {
  if (!std::isfinite(s)) throw DomainError("fractional_laplacian: s must be finite");
  return apply_even_symbol(f, [s](int k) { return k == 0 ? 0.0 : std::pow(two_pi * std::abs(k), 2.0 * s); });
}

double el_multiplier(int k, double p, double lambda) {
  if (k == 0) return 0.0;
  return 2.0 * rho(k, p) + lambda * (two_pi * k) * (two_pi * k);
}

double el_multiplier(int k, const MultiplierTable& table, double lambda) {
  if (k == 0) return 0.0;
  return 2.0 * table.rho(k) + lambda * (two_pi * k) * (two_pi * k);
}

}  // namespace tpk
