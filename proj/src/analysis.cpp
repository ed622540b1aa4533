#include "tpk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "kernel.hpp"
#include "tpk/error.hpp"

namespace tpk {
namespace {

double seminorm_power_plain(const Points& f, double s, double rho) {
  const int n = static_cast<int>(f.rows());
  double sum = detail::sum_rows(n, [&](int i) {
    double row = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      double w = std::abs(detail::offset(m, n));
      double diff = (f.row(j) - f.row(i)).norm();
      row += std::pow(diff, rho) * std::pow(w, -1.0 - rho * s);
    }
    return row;
  });
  return sum / (double(n) * n);
}

std::vector<double> arc_positions(const ClosedCurve& curve, double& total) {
  const int n = curve.size();
  std::vector<double> pos(n, 0.0);
  if (curve.rule() == DerivativeRule::central_difference) {
    for (int j = 1; j < n; ++j) pos[j] = pos[j - 1] + (curve.samples().row(j) - curve.samples().row(j - 1)).norm();
    total = pos[n - 1] + (curve.samples().row(0) - curve.samples().row(n - 1)).norm();
  } else {
    // trapezoid rule on the speed between consecutive nodes
    const Eigen::VectorXd& sp = curve.speed();
    for (int j = 1; j < n; ++j) pos[j] = pos[j - 1] + 0.5 * (sp[j - 1] + sp[j]) / n;
    total = pos[n - 1] + 0.5 * (sp[n - 1] + sp[0]) / n;
  }
  return pos;
}

BiLipschitz scan_pairs(const Points& x, const std::vector<double>& pos, double total, bool closed) {
  const int n = static_cast<int>(x.rows());
  std::vector<BiLipschitz> rows(n);
  parallel_for(n, [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    BiLipschitz best;
    best.i = best.j = i;
    for (int j = i + 1; j < n; ++j) {
      double along = pos[j] - pos[i];
      if (closed) along = std::min(along, total - along);
      double chord = (x.row(j) - x.row(i)).norm();
      if (!(along > 0.0)) continue;
      double ratio = chord > 0.0 ? along / chord : std::numeric_limits<double>::infinity();
      if (ratio > best.constant) {
        best.constant = ratio;
        best.i = i;
        best.j = j;
      }
    }
    rows[i] = best;
  });
  BiLipschitz out;
  for (const auto& r : rows)
    if (r.constant > out.constant) out = r;
  return out;
}

// max_y |P_u (y - x)| over the in-ball offsets (rows of y), given their squared norms
double line_deviation(const Eigen::MatrixXd& y, const Eigen::VectorXd& norms2, const Eigen::VectorXd& u) {
  Eigen::VectorXd along = y * u;
  return std::sqrt(std::max(0.0, (norms2 - along.cwiseAbs2()).maxCoeff()));
}

// Golden-section search of g on [lo, hi]; returns the best abscissa found.
template <class G>
double golden(G&& g, double lo, double hi, int iters = 60) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < iters; ++it) {
    if (gc <= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - ratio * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + ratio * (b - a);
      gd = g(d);
    }
  }
  return gc <= gd ? c : d;
}

// Newton on the optimality conditions of min_e max_a (|y_a|^2 - (y_a.e)^2) with the given
// active rows: (sum_a mu_a y_a y_a^T) e = nu e, |e| = 1, sum mu = 1, and every active
// squared distance equal to t. Returns false if Newton fails or a weight is negative.
bool solve_active_set(const Eigen::MatrixXd& y, const Eigen::VectorXd& norms2, const std::vector<int>& act,
                      Eigen::VectorXd& e) {
  const int d = static_cast<int>(y.cols()), k = static_cast<int>(act.size());
  const int size = d + k + 2;
  Eigen::VectorXd z(size);
  z.head(d) = e;
  z.segment(d, k).setConstant(1.0 / k);
  double t = 0.0, nu = 0.0;
  for (int a : act) {
    double along = y.row(a).dot(e);
    t = std::max(t, norms2[a] - along * along);
    nu += along * along / k;
  }
  z[d + k] = nu;
  z[d + k + 1] = t;
  const double scale = norms2.maxCoeff();
  Eigen::VectorXd res(size);
  Eigen::MatrixXd jac(size, size);
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd ev = z.head(d);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    jac.setZero();
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd ya = y.row(act[c]).transpose();
      double along = ya.dot(ev);
      m += z[d + c] * ya * ya.transpose();
      jac.block(0, d + c, d, 1) = ya * along;
      res[d + 2 + c] = norms2[act[c]] - along * along - z[d + k + 1];
      jac.block(d + 2 + c, 0, 1, d) = -2.0 * along * ya.transpose();
      jac(d + 2 + c, d + k + 1) = -1.0;
    }
    res.head(d) = m * ev - z[d + k] * ev;
    jac.topLeftCorner(d, d) = m - z[d + k] * Eigen::MatrixXd::Identity(d, d);
    jac.block(0, d + k, d, 1) = -ev;
    res[d] = ev.squaredNorm() - 1.0;
    jac.block(d, 0, 1, d) = 2.0 * ev.transpose();
    res[d + 1] = z.segment(d, k).sum() - 1.0;
    jac.block(d + 1, d, 1, k).setOnes();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return false;
    Eigen::VectorXd step = lu.solve(res);
    z -= step;
    if (!z.allFinite()) return false;
    if (step.head(d).norm() < 1e-15 && std::abs(step[d + k + 1]) < 1e-15 * scale) break;
  }
  if (z.segment(d, k).minCoeff() < -1e-12) return false;
  e = z.head(d).normalized();
  return true;
}

// Tries active sets of 2..dim rows among the largest deviations at e and keeps any
// solution that lowers the maximum.
void polish_direction(const Eigen::MatrixXd& y, const Eigen::VectorXd& norms2, Eigen::VectorXd& best,
                      double& best_value) {
  const int m = static_cast<int>(y.rows()), d = static_cast<int>(y.cols());
  for (int round = 0; round < 3; ++round) {
    Eigen::VectorXd along = y * best;
    Eigen::VectorXd dev = norms2 - along.cwiseAbs2();
    std::vector<int> order(m);
    for (int j = 0; j < m; ++j) order[j] = j;
    const int top = std::min(m, d + 2);
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](int a, int b) { return dev[a] > dev[b]; });
    bool improved = false;
    for (int mask = 1; mask < (1 << top); ++mask) {
      int bits = __builtin_popcount(static_cast<unsigned>(mask));
      if (bits < 2 || bits > d) continue;
      std::vector<int> act;
      for (int b = 0; b < top; ++b)
        if (mask & (1 << b)) act.push_back(order[b]);
      Eigen::VectorXd cand = best;
      if (!solve_active_set(y, norms2, act, cand)) continue;
      double v = line_deviation(y, norms2, cand);
      if (v < best_value) {
        best_value = v;
        best = cand;
        improved = true;
      }
    }
    if (!improved) break;
  }
}

Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& u) {
  const int dim = static_cast<int>(u.size());
  Eigen::MatrixXd basis(dim, dim - 1);
  int filled = 0;
  for (int k = 0; k < dim && filled < dim - 1; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, k);
    e -= e.dot(u) * u;
    for (int c = 0; c < filled; ++c) e -= e.dot(basis.col(c)) * basis.col(c);
    if (e.norm() > 1e-6) basis.col(filled++) = e.normalized();
  }
  return basis;
}

}  // namespace

double sobolev_seminorm(const Points& field, double s, double rho, const QuadratureSpec& quad) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("sobolev_seminorm: s must lie in (0, 1)");
  if (!(rho >= 1.0)) throw DomainError("sobolev_seminorm: rho must be at least 1");
  if (field.rows() < 8 || !field.allFinite()) throw DomainError("sobolev_seminorm: need 8 finite samples");
  Points f = field;
  if (quad.n_offsets != 0 && quad.n_offsets != field.rows()) {
    if (quad.n_offsets % 2 != 0) throw DomainError("quadrature: n_offsets must be even");
    TrigInterpolant interp(field);
    f.resize(quad.n_offsets, field.cols());
    for (int k = 0; k < quad.n_offsets; ++k) f.row(k) = interp.value(double(k) / quad.n_offsets).transpose();
  }
  double power;
  if (quad.rule == QuadratureRule::trapezoid_diagonal_excluded) {
    power = seminorm_power_plain(f, s, rho);
  } else {
    const double lead = rho * (1.0 - s);
    std::vector<double> raw;
    for (int k = 0; static_cast<int>(raw.size()) < quad.richardson_terms; ++k) {
      raw.push_back(lead + 2.0 * k);
      if (static_cast<int>(raw.size()) < quad.richardson_terms) raw.push_back(2.0 + 2.0 * k);
    }
    std::vector<double> exps = distinct_exponents(raw);
    if (exps.empty()) throw DomainError("sobolev_seminorm: Richardson needs at least one term");
    const int levels = static_cast<int>(exps.size()) + 1;
    const int n = static_cast<int>(f.rows());
    if (n % (1 << (levels - 1)) != 0 || n / (1 << (levels - 1)) < 8)
      throw DomainError("sobolev_seminorm: sample count too small or not divisible for Richardson levels");
    std::vector<double> values;
    for (int l = 0; l < levels; ++l) {
      Points sub(n >> l, f.cols());
      for (int j = 0; j < sub.rows(); ++j) sub.row(j) = f.row(j << l);
      values.push_back(seminorm_power_plain(sub, s, rho));
    }
    power = std::max(0.0, richardson(values, exps));
  }
  return std::pow(power, 1.0 / rho);
}

BiLipschitz bilipschitz_constant(const ClosedCurve& curve) {
  double total = 0.0;
  std::vector<double> pos = arc_positions(curve, total);
  return scan_pairs(curve.samples(), pos, total, true);
}

BiLipschitz bilipschitz_constant_open(const Points& polyline) {
  const int n = static_cast<int>(polyline.rows());
  if (n < 2) throw DomainError("bilipschitz_constant_open: need at least two points");
  std::vector<double> pos(n, 0.0);
  for (int j = 1; j < n; ++j) pos[j] = pos[j - 1] + (polyline.row(j) - polyline.row(j - 1)).norm();
  return scan_pairs(polyline, pos, pos.back(), false);
}

double beta_number(const ClosedCurve& curve, int x_index, double r) {
  if (!(r > 0.0)) throw DomainError("beta_number: radius must be positive");
  const int n = curve.size();
  if (x_index < 0 || x_index >= n) throw DomainError("beta_number: base index out of range");
  const Eigen::RowVectorXd x = curve.samples().row(x_index);
  std::vector<int> inside;
  for (int j = 0; j < n; ++j)
    if ((curve.samples().row(j) - x).norm() <= r) inside.push_back(j);
  if (inside.size() < 2) throw DomainError("beta_number: ball contains fewer than two samples");
  const int m = static_cast<int>(inside.size());
  const int dim = curve.dim();
  Eigen::MatrixXd y(m, dim);
  for (int k = 0; k < m; ++k) y.row(k) = curve.samples().row(inside[k]) - x;
  const Eigen::VectorXd norms2 = y.rowwise().squaredNorm();

  // candidates: principal axis of the in-ball offsets, and the direction to each of them
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y.transpose() * y);
  Eigen::VectorXd best = eig.eigenvectors().col(dim - 1);
  double best_value = line_deviation(y, norms2, best);
  for (int k = 0; k < m; ++k) {
    double len = std::sqrt(norms2[k]);
    if (len == 0.0) continue;
    Eigen::VectorXd u = y.row(k).transpose() / len;
    double v = line_deviation(y, norms2, u);
    if (v < best_value) {
      best_value = v;
      best = u;
    }
  }

  // local refinement: rotate toward tangent directions and their diagonals
  for (double width = 0.25; width > 1e-5; width *= 0.25) {
    for (int pass = 0; pass < 4; ++pass) {
      bool improved = false;
      Eigen::MatrixXd basis = tangent_basis(best);
      std::vector<Eigen::VectorXd> dirs;
      for (int a = 0; a < basis.cols(); ++a) {
        dirs.push_back(basis.col(a));
        for (int b = a + 1; b < basis.cols(); ++b) {
          dirs.push_back((basis.col(a) + basis.col(b)).normalized());
          dirs.push_back((basis.col(a) - basis.col(b)).normalized());
        }
      }
      for (const auto& t : dirs) {
        auto rotated = [&](double th) -> Eigen::VectorXd { return std::cos(th) * best + std::sin(th) * t; };
        double th = golden([&](double a) { return line_deviation(y, norms2, rotated(a)); }, -width, width, 40);
        Eigen::VectorXd cand = rotated(th).normalized();
        double v = line_deviation(y, norms2, cand);
        if (v < best_value * (1.0 - 1e-14)) {
          best_value = v;
          best = cand;
          improved = true;
        }
      }
      if (!improved) break;
    }
  }
  polish_direction(y, norms2, best, best_value);
  return std::min(1.0, best_value / r);
}

BetaProfile beta_profile(const ClosedCurve& curve, const EnergyParams& params, const std::vector<double>& radii) {
  if (radii.empty()) throw DomainError("beta_profile: no radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw DomainError("beta_profile: radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw DomainError("beta_profile: radii must increase");
  }
  BetaProfile out;
  out.radii = radii;
  out.kappa = params.beta_decay();
  const int n = curve.size();
  for (double d : radii) {
    std::vector<double> values(n, 0.0);
    parallel_for(n, [&](std::size_t j) { values[j] = beta_number(curve, static_cast<int>(j), 2.0 * d); });
    out.sup_beta.push_back(*std::max_element(values.begin(), values.end()));
  }
  out.fitted_exponent = fit_loglog_slope(out.radii, out.sup_beta);
  return out;
}

double holder_estimate(const Points& field, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("holder_estimate: alpha must lie in (0, 1]");
  const int n = static_cast<int>(field.rows());
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    double best = 0.0;
    for (int m = 1; m < n; ++m) {
      int j = (i + m) % n;
      double w = std::abs(detail::offset(m, n));
      best = std::max(best, (field.row(j) - field.row(i)).norm() / std::pow(w, alpha));
    }
    rows[i] = best;
  });
  return *std::max_element(rows.begin(), rows.end());
}

double min_strand_distance(const ClosedCurve& curve) {
  const int n = curve.size();
  const int gap = n / 16;
  std::vector<double> rows(n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    double best = std::numeric_limits<double>::infinity();
    for (int j = i + gap + 1; j < n; ++j) {
      if (n - (j - i) <= gap) break;
      best = std::min(best, (curve.samples().row(j) - curve.samples().row(i)).norm());
    }
    rows[i] = best;
  });
  return *std::min_element(rows.begin(), rows.end());
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit: need matching samples, at least two");
  const int m = static_cast<int>(x.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (int k = 0; k < m; ++k) {
    if (!(x[k] > 0.0 && y[k] > 0.0)) throw DomainError("fit: log-log fit needs positive data");
    a(k, 0) = 1.0;
    a(k, 1) = std::log(x[k]);
    b[k] = std::log(y[k]);
  }
  return a.colPivHouseholderQr().solve(b)[1];
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw DomainError("fit: need matching samples, at least three");
  const int m = static_cast<int>(x.size());
  Eigen::VectorXd b(m);
  for (int k = 0; k < m; ++k) {
    if (!(x[k] > 0.0)) throw DomainError("fit: abscissae must be positive");
    b[k] = y[k];
  }
  auto solve = [&](double a, PowerLawFit& fit) {
    Eigen::MatrixXd design(m, 2);
    for (int k = 0; k < m; ++k) {
      design(k, 0) = 1.0;
      design(k, 1) = std::pow(x[k], a);
    }
    Eigen::VectorXd coef = design.colPivHouseholderQr().solve(b);
    fit.offset = coef[0];
    fit.coefficient = coef[1];
    fit.exponent = a;
    fit.residual = std::sqrt((design * coef - b).squaredNorm() / m);
    return fit.residual;
  };
  // coarse scan then golden refinement; a = 0 is degenerate with the offset
  PowerLawFit best;
  double best_res = std::numeric_limits<double>::infinity();
  double best_a = 1.0;
  for (int k = -600; k <= 600; ++k) {
    double a = 0.01 * k;
    if (std::abs(a) < 1e-9) continue;
    PowerLawFit f;
    double r = solve(a, f);
    if (r < best_res) {
      best_res = r;
      best_a = a;
    }
  }
  double a = golden([&](double t) {
    PowerLawFit f;
    return solve(t, f);
  }, best_a - 0.01, best_a + 0.01, 80);
  solve(a, best);
  return best;
}

}  // namespace tpk
