#include "tpk/variation.hpp"

#include <cmath>
#include <functional>

#include "kernel.hpp"
#include "tpk/error.hpp"

namespace tpk {
namespace {

constexpr double min_speed = 1e-8;

Points resample_field(const Points& f, int n_out, DerivativeRule rule) {
  Points out(n_out, f.cols());
  if (rule == DerivativeRule::spectral) {
    TrigInterpolant interp(f);
    for (int k = 0; k < n_out; ++k) out.row(k) = interp.value(double(k) / n_out).transpose();
  } else {
    PeriodicCubicSpline spline(f);
    for (int k = 0; k < n_out; ++k) out.row(k) = spline.value(double(k) / n_out).transpose();
  }
  return out;
}

Points subsample_field(const Points& f, int factor) {
  Points out(f.rows() / factor, f.cols());
  for (int j = 0; j < out.rows(); ++j) out.row(j) = f.row(j * factor);
  return out;
}

using Kernel = std::function<double(const ClosedCurve&, const Points&)>;

// Applies the quadrature spec (offset grid, Richardson levels) around a plain kernel.
double with_quadrature(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                       const QuadratureSpec& quad, const Kernel& kernel) {
  if (h.rows() != curve.size() || h.cols() != curve.dim())
    throw DomainError("variation: field must match the curve's samples");
  if (!h.allFinite()) throw DomainError("variation: non-finite field entry");
  ClosedCurve c = curve;
  Points f = h;
  if (quad.n_offsets != 0 && quad.n_offsets != curve.size()) {
    if (quad.n_offsets % 2 != 0) throw DomainError("quadrature: n_offsets must be even");
    c = resample_uniform(curve, quad.n_offsets);
    f = resample_field(h, quad.n_offsets, curve.rule());
  }
  if (quad.rule == QuadratureRule::trapezoid_diagonal_excluded) return kernel(c, f);
  std::vector<double> raw;
  for (int k = 0; k < quad.richardson_terms; ++k) raw.push_back(params.diagonal_exponent() + 1.0 + 2.0 * k);
  std::vector<double> exps = distinct_exponents(raw);
  if (quad.richardson_terms < 1 || exps.size() != raw.size() || raw.front() < 0.05)
    throw DomainError("variation: Richardson needs 2q - p + 1 > 0 and at least one term");
  const int levels = static_cast<int>(exps.size()) + 1;
  if (c.size() % (1 << (levels - 1)) != 0 || c.size() / (1 << (levels - 1)) < 8)
    throw DomainError("variation: sample count too small or not divisible for Richardson levels");
  std::vector<double> values;
  for (int l = 0; l < levels; ++l) {
    if (l == 0)
      values.push_back(kernel(c, f));
    else
      values.push_back(kernel(subsample(c, 1 << l), subsample_field(f, 1 << l)));
  }
  return richardson(values, exps);
}

double general_kernel(const ClosedCurve& c, const Points& h, const EnergyParams& params) {
  const int n = c.size(), d = c.dim();
  const double p = params.p(), q = params.q();
  const Points& x = c.samples();
  const double tiny = detail::coincidence_sq(x);
  const Points& v = c.first();
  const Eigen::VectorXd& s = c.speed();
  if (s.minCoeff() < min_speed) throw RegularityError("first_variation_general: |gamma'| below 1e-8");
  const Points dh = differentiate(h, c.rule(), 1);
  double sum = detail::sum_rows(n, [&](int i) {
    std::vector<double> e(d), b(d);
    const double* xi = x.row(i).data();
    const double* vi = v.row(i).data();
    const double* hi = h.row(i).data();
    const double* dhi = dh.row(i).data();
    for (int k = 0; k < d; ++k) e[k] = vi[k] / s[i];
    double vi_dhi = 0.0;
    for (int k = 0; k < d; ++k) vi_dhi += vi[k] * dhi[k];
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      double w = detail::offset(m, n);
      const double* xj = x.row(j).data();
      const double* hj = h.row(j).data();
      const double* vj = v.row(j).data();
      const double* dhj = dh.row(j).data();
      double a2 = 0.0, along = 0.0;
      for (int k = 0; k < d; ++k) {
        double delta = xj[k] - xi[k];
        a2 += delta * delta;
        b[k] = delta - w * vi[k];
        along += b[k] * e[k];
      }
      if (a2 <= tiny) throw SelfIntersectionError("first_variation: coincident samples", i, j);
      double b2 = 0.0, delta_dh = 0.0, b_shift = 0.0, b_dhi = 0.0, vj_dhj = 0.0;
      for (int k = 0; k < d; ++k) {
        b[k] -= along * e[k];
        b2 += b[k] * b[k];
        double delta = xj[k] - xi[k];
        double dhk = hj[k] - hi[k];
        delta_dh += delta * dhk;
        b_shift += b[k] * (dhk - w * dhi[k]);
        b_dhi += b[k] * dhi[k];
        vj_dhj += vj[k] * dhj[k];
      }
      // <a, gamma'(u)>/|gamma'(u)|^2 with a the shifted difference
      double shift_along = along / s[i];
      double ap = std::pow(a2, -0.5 * p);
      double bq = std::pow(b2, 0.5 * q);
      double t1 = b2 > 0.0 ? q * (b_shift - shift_along * b_dhi) * ap * std::pow(b2, 0.5 * q - 1.0) : 0.0;
      double t2 = -p * bq * delta_dh * ap / a2;
      double t3 = bq * ap * (vi_dhi / (s[i] * s[i]) + vj_dhj / (s[j] * s[j]));
      row += (t1 + t2 + t3) * s[j];
    }
    return row * s[i];
  });
  return sum / (double(n) * n);
}

// Arc-length formula on a unit-speed curve; tangent and h' are given already scaled.
double arclength_kernel(const Points& x, const Points& t, const Points& h, const Points& dh,
                        const EnergyParams& params) {
  const int n = static_cast<int>(x.rows()), d = static_cast<int>(x.cols());
  const double tiny = detail::coincidence_sq(x);
  const double p = params.p(), q = params.q();
  double sum = detail::sum_rows(n, [&](int i) {
    std::vector<double> b(d);
    const double* xi = x.row(i).data();
    const double* ti = t.row(i).data();
    const double* hi = h.row(i).data();
    const double* dhi = dh.row(i).data();
    double ti_dhi = 0.0;
    for (int k = 0; k < d; ++k) ti_dhi += ti[k] * dhi[k];
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      double w = detail::offset(m, n);
      const double* xj = x.row(j).data();
      const double* tj = t.row(j).data();
      const double* hj = h.row(j).data();
      const double* dhj = dh.row(j).data();
      double a2 = 0.0, along = 0.0, delta_t = 0.0;
      for (int k = 0; k < d; ++k) {
        double delta = xj[k] - xi[k];
        a2 += delta * delta;
        delta_t += delta * ti[k];
        b[k] = delta - w * ti[k];
        along += b[k] * ti[k];
      }
      if (a2 <= tiny) throw SelfIntersectionError("first_variation: coincident samples", i, j);
      double b2 = 0.0, num = 0.0, delta_dh = 0.0, tj_dhj = 0.0;
      for (int k = 0; k < d; ++k) {
        b[k] -= along * ti[k];
        b2 += b[k] * b[k];
        double delta = xj[k] - xi[k];
        double dhk = hj[k] - hi[k];
        num += b[k] * (dhk - delta_t * dhi[k]);
        delta_dh += delta * dhk;
        tj_dhj += tj[k] * dhj[k];
      }
      double ap = std::pow(a2, -0.5 * p);
      double bq = std::pow(b2, 0.5 * q);
      double t1 = b2 > 0.0 ? q * num * ap * std::pow(b2, 0.5 * q - 1.0) : 0.0;
      double t2 = -p * bq * delta_dh * ap / a2;
      double t3 = bq * ap * (ti_dhi + tj_dhj);
      row += t1 + t2 + t3;
    }
    return row;
  });
  return sum / (double(n) * n);
}

}  // namespace

bool is_arclength(const ClosedCurve& curve, double tol) { return curve.speed_deviation() < tol; }

double first_variation_arclength(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                                 const QuadratureSpec& quad) {
  if (!is_arclength(curve))
    throw DomainError("first_variation_arclength: curve is not parametrized proportionally to arc length "
                      "(resample it or use first_variation_general)");
  return with_quadrature(curve, h, params, quad, [&](const ClosedCurve& c, const Points& f) {
    const double len = c.length();
    if (!(len > 0.0)) throw DegenerateCurveError("first_variation_arclength: zero length");
    Points x = c.samples() / len;
    Points t = c.first() / len;
    Points g = f / len;
    Points dg = differentiate(g, c.rule(), 1);
    return std::pow(len, params.scaling_power()) * arclength_kernel(x, t, g, dg, params);
  });
}

double first_variation_general(const ClosedCurve& curve, const VariationField& h, const EnergyParams& params,
                               const QuadratureSpec& quad) {
  return with_quadrature(curve, h, params, quad,
                         [&](const ClosedCurve& c, const Points& f) { return general_kernel(c, f, params); });
}

DiscreteGradient discrete_gradient(const ClosedCurve& curve, const EnergyParams& params) {
  const int n = curve.size(), d = curve.dim();
  const double p = params.p(), q = params.q();
  const Points& x = curve.samples();
  const double tiny = detail::coincidence_sq(x);
  const Points& v = curve.first();
  const Eigen::VectorXd& s = curve.speed();
  if (s.minCoeff() < min_speed) throw RegularityError("discrete_gradient: |gamma'| below 1e-8");

  // Summand f(i, j) = B^{q/2} A^{-p/2} s_i s_j with A = |dx|^2, B = |P_i dx|^2.
  // Returns f and fills d_delta (df/d dx), d_vi (df/dv_i), d_vj (df/dv_j).
  auto summand = [&](int i, int j, double w, double* d_delta, double* d_vi, double* d_vj, double* e, double* b) {
    const double* xi = x.row(i).data();
    const double* xj = x.row(j).data();
    const double* vi = v.row(i).data();
    const double* vj = v.row(j).data();
    double a2 = 0.0, along = 0.0, c = 0.0;
    for (int k = 0; k < d; ++k) {
      e[k] = vi[k] / s[i];
      double delta = xj[k] - xi[k];
      a2 += delta * delta;
      c += delta * e[k];
      b[k] = delta - w * vi[k];
      along += b[k] * e[k];
    }
    if (a2 <= tiny) throw SelfIntersectionError("discrete_gradient: coincident samples", i, j);
    double b2 = 0.0;
    for (int k = 0; k < d; ++k) {
      b[k] -= along * e[k];
      b2 += b[k] * b[k];
    }
    const double ap = std::pow(a2, -0.5 * p);
    const double bq = std::pow(b2, 0.5 * q);
    const double bq1 = b2 > 0.0 ? q * std::pow(b2, 0.5 * q - 1.0) : 0.0;
    const double f = bq * ap * s[i] * s[j];
    for (int k = 0; k < d; ++k) {
      double delta = xj[k] - xi[k];
      d_delta[k] = s[i] * s[j] * ap * (bq1 * b[k] - p * bq * delta / a2);
      d_vi[k] = f / s[i] * e[k] - c * s[j] * ap * bq1 * b[k];
      d_vj[k] = f / s[j] * vj[k] / s[j];
    }
    return f;
  };

  Points gx = Points::Zero(n, d), gv = Points::Zero(n, d);
  std::vector<double> energy_rows(n, 0.0);
  parallel_for(n, [&](std::size_t kk) {
    const int node = static_cast<int>(kk);
    std::vector<double> dd(d), dvi(d), dvj(d), e(d), b(d);
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      double w = detail::offset(m, n);
      // node as base point
      int j = (node + m) % n;
      row += summand(node, j, w, dd.data(), dvi.data(), dvj.data(), e.data(), b.data());
      for (int k = 0; k < d; ++k) {
        gx(node, k) -= dd[k];
        gv(node, k) += dvi[k];
      }
      // node as the partner of base point i = node - m
      int i = (node - m + n) % n;
      summand(i, node, w, dd.data(), dvi.data(), dvj.data(), e.data(), b.data());
      for (int k = 0; k < d; ++k) {
        gx(node, k) += dd[k];
        gv(node, k) += dvj[k];
      }
    }
    energy_rows[node] = row;
  });
  const double scale = 1.0 / (double(n) * n);
  DiscreteGradient out;
  out.energy = pairwise_sum(energy_rows) * scale;
  // d/dx of terms in v = D x is D^T gv = -D gv
  out.values = (gx + differentiate_adjoint(gv, curve.rule())) * (scale * n);
  return out;
}

Points length_gradient(const ClosedCurve& curve) {
  const int n = curve.size();
  if (curve.rule() == DerivativeRule::central_difference) {
    // perimeter of the sample polygon
    Points g = Points::Zero(n, curve.dim());
    for (int j = 0; j < n; ++j) {
      Eigen::RowVectorXd chord = curve.samples().row((j + 1) % n) - curve.samples().row(j);
      double len = chord.norm();
      if (!(len > 0.0)) throw DegenerateCurveError("length_gradient: repeated sample");
      g.row(j) -= chord / len;
      g.row((j + 1) % n) += chord / len;
    }
    return g * double(n);
  }
  if (curve.speed().minCoeff() < min_speed) throw RegularityError("length_gradient: |gamma'| below 1e-8");
  Points unit = curve.first();
  for (int j = 0; j < n; ++j) unit.row(j) /= curve.speed()[j];
  return differentiate_adjoint(unit, curve.rule());
}

}  // namespace tpk
