#include "tpk/energy.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "kernel.hpp"
#include "tpk/error.hpp"

namespace tpk {
namespace {

ClosedCurve on_offset_grid(const ClosedCurve& curve, const QuadratureSpec& quad) {
  if (quad.n_offsets == 0 || quad.n_offsets == curve.size()) return curve;
  if (quad.n_offsets % 2 != 0) throw DomainError("quadrature: n_offsets must be even");
  return resample_uniform(curve, quad.n_offsets);
}

double plain_energy(const ClosedCurve& c, const EnergyParams& params) {
  const int n = c.size(), d = c.dim();
  const double p = params.p(), q = params.q();
  const Points& x = c.samples();
  const double tiny = detail::coincidence_sq(x);
  const Points& v = c.first();
  const Eigen::VectorXd& s = c.speed();
  double sum = detail::sum_rows(n, [&](int i) {
    if (!(s[i] > 0.0)) throw RegularityError("tp_energy: vanishing tangent at sample " + std::to_string(i));
    std::vector<double> e(d), shifted(d);
    const double* xi = x.row(i).data();
    const double* vi = v.row(i).data();
    for (int k = 0; k < d; ++k) e[k] = vi[k] / s[i];
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      double w = detail::offset(m, n);
      const double* xj = x.row(j).data();
      double a2 = 0.0, along = 0.0;
      for (int k = 0; k < d; ++k) {
        double delta = xj[k] - xi[k];
        a2 += delta * delta;
        shifted[k] = delta - w * vi[k];
        along += shifted[k] * e[k];
      }
      if (a2 <= tiny) throw SelfIntersectionError("tp_energy: coincident samples", i, j);
      double b2 = 0.0;
      for (int k = 0; k < d; ++k) {
        double nk = shifted[k] - along * e[k];
        b2 += nk * nk;
      }
      row += std::pow(b2, 0.5 * q) * std::pow(a2, -0.5 * p) * s[j];
    }
    return row * s[i];
  });
  return sum / (double(n) * n);
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::non_repulsive: return "non_repulsive";
    case Regime::critical: return "critical";
    case Regime::subcritical: return "subcritical";
    case Regime::singular: return "singular";
  }
  return "unknown";
}

EnergyParams::EnergyParams(double p, double q) : p_(p), q_(q) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("energy: p must be positive");
  if (!(q >= 1.0) || !std::isfinite(q)) throw DomainError("energy: q must be at least 1");
}

Regime EnergyParams::regime() const {
  constexpr double tie = 1e-12;
  if (std::abs(p_ - (q_ + 2.0)) <= tie) return Regime::critical;
  if (p_ < q_ + 2.0) return Regime::non_repulsive;
  if (p_ < 2.0 * q_ + 1.0 - tie) return Regime::subcritical;
  return Regime::singular;
}

EnergyParams classify(double p, double q) { return EnergyParams(p, q); }

double richardson(std::span<const double> values, std::span<const double> exponents) {
  const int m = static_cast<int>(exponents.size());
  if (static_cast<int>(values.size()) < m + 1) throw DomainError("richardson: need one more value than exponents");
  Eigen::MatrixXd a(m + 1, m + 1);
  Eigen::VectorXd b(m + 1);
  for (int l = 0; l <= m; ++l) {
    a(l, 0) = 1.0;
    for (int k = 0; k < m; ++k) a(l, k + 1) = std::pow(2.0, l * exponents[k]);
    b[l] = values[l];
  }
  return a.fullPivLu().solve(b)[0];
}

std::vector<double> distinct_exponents(std::span<const double> exponents) {
  std::vector<double> out;
  for (double e : exponents) {
    if (!(e > 0.0)) continue;
    bool close = false;
    for (double kept : out) close = close || std::abs(kept - e) < 0.05;
    if (!close) out.push_back(e);
  }
  return out;
}

double tp_energy(const ClosedCurve& curve, const EnergyParams& params, const QuadratureSpec& quad) {
  ClosedCurve c = on_offset_grid(curve, quad);
  if (quad.rule == QuadratureRule::trapezoid_diagonal_excluded) return plain_energy(c, params);

  // error expansion of the diagonal-excluded rule: h^{2q-p+1}, h^{2q-p+3}, ...
  std::vector<double> raw;
  for (int k = 0; k < quad.richardson_terms; ++k) raw.push_back(params.diagonal_exponent() + 1.0 + 2.0 * k);
  std::vector<double> exps = distinct_exponents(raw);
  if (quad.richardson_terms < 1 || exps.size() != raw.size() || raw.front() < 0.05)
    throw DomainError("tp_energy: Richardson needs 2q - p + 1 > 0 and at least one term");
  const int levels = static_cast<int>(exps.size()) + 1;
  if (c.size() % (1 << (levels - 1)) != 0 || c.size() / (1 << (levels - 1)) < 8)
    throw DomainError("tp_energy: sample count too small or not divisible for Richardson levels");
  std::vector<double> values;
  for (int l = 0; l < levels; ++l) values.push_back(plain_energy(l == 0 ? c : subsample(c, 1 << l), params));
  return richardson(values, exps);
}

SampledArc to_arc(const ClosedCurve& curve) {
  SampledArc arc;
  arc.points = curve.samples();
  arc.tangents = curve.first();
  for (int j = 0; j < curve.size(); ++j) {
    if (!(curve.speed()[j] > 0.0)) throw RegularityError("to_arc: vanishing tangent");
    arc.tangents.row(j) /= curve.speed()[j];
  }
  arc.weights = curve.speed() / double(curve.size());
  return arc;
}

SampledArc graded_segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double focus, double finest,
                          int order) {
  if (!(focus >= 0.0 && focus <= 1.0)) throw DomainError("graded_segment: focus must lie in [0, 1]");
  if (!(finest > 0.0)) throw DomainError("graded_segment: finest panel must be positive");
  if (order != 20) throw DomainError("graded_segment: only order 20 is available");
  Eigen::VectorXd dir = b - a;
  const double len = dir.norm();
  if (!(len > 0.0)) throw DomainError("graded_segment: zero length");
  // breakpoints focus +- 2^{-k} down to `finest`, clipped to [0, 1]
  std::vector<double> cuts{0.0, 1.0, focus};
  for (double r = 0.5; r >= finest; r *= 0.5) {
    if (focus - r > 0.0) cuts.push_back(focus - r);
    if (focus + r < 1.0) cuts.push_back(focus + r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  using rule = boost::math::quadrature::gauss<double, 20>;
  std::vector<double> t, wt;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    double lo = cuts[c], hi = cuts[c + 1];
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < rule::abscissa().size(); ++k) {
      double x = rule::abscissa()[k], w = rule::weights()[k];
      if (x == 0.0) {
        t.push_back(mid);
        wt.push_back(w * half);
      } else {
        t.push_back(mid - half * x);
        wt.push_back(w * half);
        t.push_back(mid + half * x);
        wt.push_back(w * half);
      }
    }
  }
  SampledArc arc;
  const int m = static_cast<int>(t.size());
  arc.points.resize(m, a.size());
  arc.tangents.resize(m, a.size());
  arc.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    arc.points.row(i) = (a + t[i] * dir).transpose();
    arc.tangents.row(i) = (dir / len).transpose();
    arc.weights[i] = wt[i] * len;
  }
  return arc;
}

double cross_energy(const SampledArc& base, const SampledArc& target, const EnergyParams& params) {
  if (base.points.cols() != target.points.cols()) throw DomainError("cross_energy: dimension mismatch");
  const double p = params.p(), q = params.q();
  const int n = static_cast<int>(base.points.rows());
  const int m = static_cast<int>(target.points.rows());
  const double tiny = std::max(detail::coincidence_sq(base.points), detail::coincidence_sq(target.points));
  return detail::sum_rows(n, [&](int i) {
    Eigen::VectorXd x = base.points.row(i).transpose();
    Eigen::VectorXd e = base.tangents.row(i).transpose();
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd delta = target.points.row(j).transpose() - x;
      double a2 = delta.squaredNorm();
      if (a2 <= tiny) throw SelfIntersectionError("cross_energy: curves intersect", i, j);
      double b2 = (delta - delta.dot(e) * e).squaredNorm();
      row += target.weights[j] * std::pow(b2, 0.5 * q) * std::pow(a2, -0.5 * p);
    }
    return base.weights[i] * row;
  });
}

PairEnergy pair_energy(const ClosedCurve& a, const ClosedCurve& b, const EnergyParams& params,
                       const QuadratureSpec& quad) {
  if (a.dim() != b.dim()) throw DomainError("pair_energy: dimension mismatch");
  PairEnergy out;
  out.self_a = tp_energy(a, params, quad);
  out.self_b = tp_energy(b, params, quad);
  SampledArc arc_a = to_arc(on_offset_grid(a, quad));
  SampledArc arc_b = to_arc(on_offset_grid(b, quad));
  out.cross_ab = cross_energy(arc_a, arc_b, params);
  out.cross_ba = cross_energy(arc_b, arc_a, params);
  out.total = (out.self_a + out.self_b) + (out.cross_ab + out.cross_ba);
  return out;
}

ClassicalComparison classical_equivalence(const ClosedCurve& curve, double q_cls) {
  if (!(q_cls >= 2.0)) throw DomainError("classical_equivalence: q_cls must be at least 2");
  const int n = curve.size();
  const Points& x = curve.samples();
  const double tiny = detail::coincidence_sq(x);
  const Points& v = curve.first();
  const Eigen::VectorXd& s = curve.speed();
  const double q = q_cls, p = 2.0 * q_cls;
  std::vector<double> lhs_rows(n), rhs_rows(n), dev_rows(n);
  parallel_for(n, [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    Eigen::VectorXd e = v.row(i).transpose() / s[i];
    double lhs = 0.0, rhs = 0.0, dev = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      double w = detail::offset(m, n);
      Eigen::VectorXd delta = (x.row(j) - x.row(i)).transpose();
      double a2 = delta.squaredNorm();
      if (a2 <= tiny) throw SelfIntersectionError("classical_equivalence: coincident samples", i, j);
      Eigen::VectorXd shifted = delta - w * v.row(i).transpose();
      double dist = (shifted - shifted.dot(e) * e).norm();
      double measure = s[i] * s[j];
      // tangent-point radius r = chord^2 / (2 dist); a straight configuration has 1/r = 0
      double inv_r = dist > 0.0 ? 1.0 / (a2 / (2.0 * dist)) : 0.0;
      double l = std::pow(inv_r, q) * measure;
      double r = std::pow(2.0, q) * std::pow(dist, q) / std::pow(a2, 0.5 * p) * measure;
      lhs += l;
      rhs += r;
      double scale = std::max(std::abs(l), std::abs(r));
      if (scale > 0.0) dev = std::max(dev, std::abs(l - r) / scale);
    }
    lhs_rows[i] = lhs;
    rhs_rows[i] = rhs;
    dev_rows[i] = dev;
  });
  ClassicalComparison out;
  out.lhs = pairwise_sum(lhs_rows) / (double(n) * n);
  out.rhs = pairwise_sum(rhs_rows) / (double(n) * n);
  for (double d : dev_rows) out.max_summand_deviation = std::max(out.max_summand_deviation, d);
  return out;
}

}  // namespace tpk
