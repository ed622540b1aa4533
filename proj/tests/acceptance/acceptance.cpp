// One PASS/FAIL line per acceptance criterion. `--only N` runs a single criterion.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "tpk/analysis.hpp"
#include "tpk/energy.hpp"
#include "tpk/flow.hpp"
#include "tpk/io.hpp"
#include "tpk/spectral.hpp"
#include "tpk/study.hpp"
#include "tpk/variation.hpp"

using namespace tpk;

namespace {

// Collects sub-checks; the criterion passes only if all of them do.
struct Check {
  bool ok = true;
  std::ostringstream log;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << " [failed: " << what << "]";
    }
  }
  template <class T>
  void note(const std::string& key, T value) {
    log << " " << key << "=" << value;
  }
};

double rel(double a, double b) { return std::abs(a / b - 1.0); }

double fd_tau(const ClosedCurve& c) { return 1e-4 * (1.0 + c.samples().cwiseAbs().maxCoeff()); }

Points mode_field(int n, int dim, int k, int component) {
  Points f = Points::Zero(n, dim);
  for (int j = 0; j < n; ++j) f(j, component) = std::cos(2.0 * oracle::pi * k * j / n);
  return f;
}

void ac1(Check& c) {
  const double pi2 = oracle::pi * oracle::pi;
  double prev = 1.0;
  bool decreasing = true;
  for (int n : {256, 512, 1024, 2048}) {
    ClosedCurve circle = make_primitive(Circle{0.5 / oracle::pi}, n);
    double err = rel(tp_energy(circle, EnergyParams(4, 2)), pi2);
    c.note("err_n" + std::to_string(n), err);
    decreasing = decreasing && err < prev;
    if (n == 1024) c.expect(err < 1e-2, "unit circle within 1% at n=1024");
    prev = err;
  }
  c.expect(decreasing, "error decreases under doubling");

  // plain trapezoid converges like h^{1/2} here; extrapolate over n, n/2, n/4
  QuadratureSpec quad{QuadratureRule::trapezoid_richardson, 0, 3};
  double e = tp_energy(make_primitive(Circle{1.0}, 2048), EnergyParams(4.5, 2), quad);
  double err = rel(e, oracle::circle_energy(1.0, 4.5, 2.0));
  c.note("err_p4.5", err);
  c.expect(err < 1e-2, "R=1, p=4.5 within 1% of the Wallis oracle");
}

void ac2(Check& c) {
  EnergyParams params(4.5, 2);
  double worst = 0.0;
  for (const ClosedCurve& curve : {make_primitive(Circle{1.0}, 256), oracle::unit_trefoil(256)}) {
    double base = tp_energy(curve, params);
    for (double s : {0.5, 2.0, 10.0})
      worst = std::max(worst, rel(tp_energy(transform(curve, s), params), std::pow(s, params.scaling_power()) * base));
  }
  c.note("worst_rel", worst);
  c.expect(worst < 1e-11, "scaling law to 1e-11");
}

void ac3(Check& c) {
  std::vector<std::pair<ClosedCurve, double>> cases{
      {make_primitive(Circle{}, 128), 2.0},
      {oracle::unit_trefoil(128), 2.5},
      {make_primitive(Ellipse{}, 128), 3.0},
  };
  double worst = 0.0;
  for (const auto& [curve, q] : cases) {
    ClassicalComparison cmp = classical_equivalence(curve, q);
    worst = std::max({worst, cmp.max_summand_deviation, rel(cmp.lhs, cmp.rhs)});
  }
  c.note("worst_summand_deviation", worst);
  c.expect(worst < 1e-12, "summand-wise identity to 1e-12");
}

void ac4(Check& c) {
  const EnergyParams params(4.5, 2);
  std::mt19937_64 rng(4);
  double worst = 0.0;
  std::vector<ClosedCurve> curves{make_primitive(Circle{}, 128), make_primitive(Ellipse{}, 128),
                                  make_primitive(TorusKnot{}, 128, 3)};
  for (const ClosedCurve& curve : curves) {
    for (int trial = 0; trial < 10; ++trial) {
      Points h = oracle::smooth_field(curve.size(), curve.dim(), rng);
      double fd = oracle::energy_fd(curve, h, params, fd_tau(curve));
      worst = std::max(worst, rel(first_variation_general(curve, h, params), fd));
    }
  }
  c.note("worst_fd_rel", worst);
  c.expect(worst < 1e-5, "first variation vs finite differences");

  // translations on every curve, scaled by the variation along the position field
  double worst_translation = 0.0;
  for (const ClosedCurve& curve : curves) {
    double scale = std::abs(first_variation_general(curve, curve.samples(), params));
    Eigen::RowVectorXd v = Eigen::RowVectorXd::LinSpaced(curve.dim(), 1.0, 0.3);
    worst_translation =
        std::max(worst_translation, std::abs(first_variation_general(curve, oracle::constant_field(curve.size(), v), params)) / scale);
  }
  c.note("translation", worst_translation);
  c.expect(worst_translation < 1e-6, "translation variation");

  // tangential reparametrization on the circle, where the sampling stays uniform
  ClosedCurve circle = curves[0];
  double scale = std::abs(first_variation_general(circle, circle.samples(), params));
  Points h = circle.first();
  for (int j = 0; j < circle.size(); ++j) h.row(j) *= 1.0 + 0.5 * std::sin(2.0 * oracle::pi * 3 * j / circle.size());
  double tangential = std::abs(first_variation_general(circle, h, params)) / scale;
  c.note("tangential", tangential);
  c.expect(tangential < 1e-6, "tangential variation");
}

void ac5(Check& c) {
  MultiplierTable table = MultiplierTable::build(4.5, 256);
  QuadratureSpec rich{QuadratureRule::trapezoid_richardson, 0, 3};
  double worst = 0.0;
  for (int k : {1, 2, 5, 17}) {
    Points f = mode_field(1024, 2, k, 0);
    worst = std::max(worst, rel(Q_direct(f, f, 4.5, rich), Q_multiplier(f, f, table)));
  }
  c.note("worst_Q_rel", worst);
  c.expect(worst < 1e-6, "Q_direct = Q_multiplier on single modes");
  c.expect(table.rho(0) == 0.0, "rho_0 = 0");
  bool monotone = true;
  for (int k = 1; k <= table.k_max(); ++k) monotone = monotone && table.rho(k) > table.rho(k - 1);
  c.expect(monotone, "rho monotone");
  AsymptoticConstant ac = table.asymptotic();
  c.expect(rel(ac.value, oracle::asymptotic_constant(4.5)) < 1e-10, "constant matches the closed form");
  double ratio = table.rho(256) * std::pow(256.0, -3.5) / ac.value;
  c.note("rho256_ratio", ratio);
  c.expect(std::abs(ratio - 1.0) < 1e-2, "rho_k / k^{p-1} within 1% at k=256");
}

void ac6(Check& c) {
  // unit length, so the bilinear form needs no length bookkeeping
  ClosedCurve t = oracle::unit_trefoil(256);
  EnergyParams params(4.5, 2);
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    Points h = random_smooth_field(256, 3, rng);
    // both sides computed separately
    double variation = first_variation_arclength(t, h, params);
    double bilinear = Q_direct(t.samples(), h, params.p());
    double remainder = remainder_term(t, h, params);
    double mismatch = std::abs(variation - 2.0 * bilinear - remainder) / (std::abs(variation) + std::abs(2.0 * bilinear));
    worst = std::max(worst, mismatch);
  }
  c.note("worst_mismatch", worst);
  c.expect(worst < 1e-6, "variation = 2Q + R");
}

void ac7(Check& c) {
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  for (auto [p, q] : {std::pair{4.5, 2.0}, std::pair{3.0, 2.0}}) {
    EnergyParams params(p, q);
    std::vector<double> values;
    for (double d : deltas) values.push_back(two_strand_cross_energy(d, params));
    PowerLawFit fit = fit_power_law(deltas, values);
    double target = q + 2.0 - p;
    std::ostringstream key;
    key << "exponent(" << p << "," << q << ")";
    c.note(key.str(), fit.exponent);
    c.expect(std::abs(fit.exponent - target) <= 0.1 * std::abs(target), key.str() + " within 10% of q+2-p");
  }
}

void ac8(Check& c) {
  double circle = bilipschitz_constant(make_primitive(Circle{}, 512)).constant;
  c.note("circle", circle);
  c.expect(std::abs(circle - oracle::pi / 2) < 1e-3, "circle constant pi/2");
  double prev = 0.0;
  bool grows = true;
  for (double d : {0.2, 0.1, 0.05, 0.025}) {
    double b = bilipschitz_constant(make_primitive(FigureEight{d}, 512, 3)).constant;
    c.note("eight", b);
    grows = grows && b > prev;
    prev = b;
  }
  c.expect(grows, "figure-eight constant grows as the offset halves");
}

// inf over 4096 directions of the max distance to a line through x, over r.
double beta_brute_force(const ClosedCurve& curve, int x_index, double r) {
  Eigen::RowVector2d x = curve.samples().row(x_index);
  double best = 1e300;
  for (int a = 0; a < 4096; ++a) {
    double th = oracle::pi * a / 4096.0;
    Eigen::RowVector2d normal(-std::sin(th), std::cos(th));
    double worst = 0.0;
    for (int j = 0; j < curve.size(); ++j) {
      Eigen::RowVector2d y = curve.samples().row(j);
      if ((y - x).norm() <= r) worst = std::max(worst, std::abs((y - x).dot(normal)));
    }
    best = std::min(best, worst / r);
  }
  return best;
}

void ac9(Check& c) {
  ClosedCurve circle = make_primitive(Circle{}, 256);
  double worst = 0.0;
  for (double r : {0.2, 0.4})
    for (int x : {0, 17, 100}) worst = std::max(worst, std::abs(beta_number(circle, x, r) - beta_brute_force(circle, x, r)));
  c.note("circle_vs_brute", worst);
  c.expect(worst < 1e-4, "circle beta matches brute force");

  Points sq(4, 2);
  sq << 0, 0, 1, 0, 1, 1, 0, 1;
  ClosedCurve square = make_primitive(Polygon{sq}, 400);
  double edge = std::max(beta_number(square, 50, 0.2), beta_number(square, 150, 0.3));
  c.note("edge", edge);
  c.expect(edge < 1e-9, "straight edge gives 0");

  EnergyParams params(4.5, 2);
  BetaProfile circle_prof = beta_profile(make_primitive(Circle{0.5 / oracle::pi}, 1024), params, {0.0025, 0.005, 0.01, 0.02});
  BetaProfile trefoil_prof = beta_profile(oracle::unit_trefoil(1024), params, {0.0025, 0.005, 0.01, 0.02});
  c.note("kappa", trefoil_prof.kappa);
  c.note("circle_exponent", circle_prof.fitted_exponent);
  c.note("trefoil_exponent", trefoil_prof.fitted_exponent);
  c.expect(circle_prof.fitted_exponent >= circle_prof.kappa, "circle decay exponent >= kappa");
  c.expect(trefoil_prof.fitted_exponent >= trefoil_prof.kappa, "trefoil decay exponent >= kappa");
}

void ac10(Check& c) {
  FlowConfig pre;
  pre.precondition = true;
  pre.max_iters = 500;
  ClosedCurve start = make_primitive(PerturbedCircle{0.05, 5}, 128);
  FlowTrace trace = run_flow(start, pre);
  double factor = non_round_energy(start) / non_round_energy(trace.final_state->curve);
  bool monotone = true;
  double length_dev = 0.0;
  for (size_t k = 0; k < trace.rows.size(); ++k) {
    length_dev = std::max(length_dev, std::abs(trace.rows[k].length - 1.0));
    if (k > 0) monotone = monotone && trace.rows[k].energy <= trace.rows[k - 1].energy;
  }
  c.note("factor", factor);
  c.note("accepted_steps", trace.rows.size() - 1);
  c.note("length_dev", length_dev);
  c.expect(factor >= 100.0, "non-round reduction >= 100");
  c.expect(trace.rows.size() <= 501, "within 500 steps");
  c.expect(monotone, "energy monotone");
  c.expect(length_dev <= 1e-8, "length fixed");

  FlowTrace circle = run_flow(make_primitive(Circle{}, 128), FlowConfig{});
  c.expect(circle.stop_reason == "tol_grad" && circle.rows.size() == 1, "circle stops stationary at once");

  FlowConfig plain;
  plain.max_iters = 200;
  FlowTrace knot = run_flow(make_primitive(TorusKnot{}, 96, 3), plain);
  double min_dist = 1e300;
  for (const TraceRow& r : knot.rows) min_dist = std::min(min_dist, r.min_dist);
  c.note("trefoil_min_dist", min_dist);
  c.expect(min_dist > plain.min_distance_guard, "trefoil stays above the guard");
}

void ac11(Check& c) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("tpk_ac11_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  const std::string exe = TPK_CLI_PATH;
  int ra = std::system((exe + " study --seed 7 --out " + a).c_str());
  int rb = std::system((exe + " study --seed 7 --out " + b).c_str());
  c.expect(ra == 0 && rb == 0, "study exits 0");
  if (ra == 0 && rb == 0) {
    std::string ta = read_text(a), tb = read_text(b);
    c.note("bytes", ta.size());
    c.expect(!ta.empty() && ta == tb, "reports are bit-identical");
  }
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void(Check&)>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  if (only < 0 || only > int(criteria.size())) {
    std::cerr << "--only expects 1.." << criteria.size() << "\n";
    return 2;
  }
  int failures = 0;
  for (int k = 1; k <= int(criteria.size()); ++k) {
    if (only != 0 && k != only) continue;
    Check c;
    try {
      criteria[k - 1](c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.log << " [exception: " << e.what() << "]";
    }
    std::cout << "AC" << k << " " << (c.ok ? "PASS" : "FAIL") << c.log.str() << std::endl;
    if (!c.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
