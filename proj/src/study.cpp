#include "tpk/study.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "tpk/analysis.hpp"
#include "tpk/flow.hpp"
#include "tpk/spectral.hpp"
#include "tpk/variation.hpp"

namespace tpk {

using nlohmann::json;

Points random_smooth_field(int n, int dim, std::mt19937_64& rng, int modes) {
  std::normal_distribution<double> normal;
  Points f = Points::Zero(n, dim);
  for (int c = 0; c < dim; ++c) {
    for (int k = 1; k <= modes; ++k) {
      double a = normal(rng) / (k * k), b = normal(rng) / (k * k);
      for (int j = 0; j < n; ++j) {
        double arg = 2.0 * std::numbers::pi * k * j / n;
        f(j, c) += a * std::cos(arg) + b * std::sin(arg);
      }
    }
  }
  return f;
}

double two_strand_cross_energy(double delta, const EnergyParams& params) {
  const double finest = std::min(1e-3, delta / 64.0);
  SampledArc a = graded_segment(Eigen::Vector3d(-1, 0, 0), Eigen::Vector3d(1, 0, 0), 0.5, finest);
  SampledArc b = graded_segment(Eigen::Vector3d(0, -1, delta), Eigen::Vector3d(0, 1, delta), 0.5, finest);
  return cross_energy(a, b, params) + cross_energy(b, a, params);
}

std::string run_study(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  json report;
  report["seed"] = seed;
  const EnergyParams sub(4.5, 2.0);

  {
    json rows = json::array();
    for (int n : {256, 512, 1024}) {
      ClosedCurve c = make_primitive(Circle{1.0 / (2.0 * std::numbers::pi)}, n);
      double e = tp_energy(c, EnergyParams(4.0, 2.0));
      rows.push_back({{"n", n}, {"energy", e}, {"relative_error", e / (std::numbers::pi * std::numbers::pi) - 1.0}});
    }
    report["circle_p4_q2"] = rows;
  }

  ClosedCurve trefoil = resample_arclength(make_primitive(TorusKnot{}, 128, 3), 128);
  {
    json rows = json::array();
    double base = tp_energy(trefoil, sub);
    for (double s : {0.5, 2.0, 10.0}) {
      double e = tp_energy(transform(trefoil, s), sub);
      rows.push_back({{"scale", s}, {"relative_error", e / (std::pow(s, sub.scaling_power()) * base) - 1.0}});
    }
    report["scaling"] = rows;
  }

  {
    ClassicalComparison cc = classical_equivalence(trefoil, 2.5);
    report["classical"] = {{"lhs", cc.lhs}, {"rhs", cc.rhs}, {"max_summand_deviation", cc.max_summand_deviation}};
  }

  {
    json rows = json::array();
    DiscreteGradient g = discrete_gradient(trefoil, sub);
    const double tau = 1e-4 * (1.0 + trefoil.samples().cwiseAbs().maxCoeff());
    for (int t = 0; t < 5; ++t) {
      Points h = random_smooth_field(trefoil.size(), trefoil.dim(), rng);
      double fd = (tp_energy(ClosedCurve(trefoil.samples() + tau * h), sub) -
                   tp_energy(ClosedCurve(trefoil.samples() - tau * h), sub)) / (2.0 * tau);
      double paired = l2_inner(g.values, h);
      double general = first_variation_general(trefoil, h, sub);
      double arclength = first_variation_arclength(trefoil, h, sub);
      Decomposition d = decompose(trefoil, h, sub);
      rows.push_back({{"finite_difference", fd},
                      {"gradient", paired},
                      {"general", general},
                      {"arclength", arclength},
                      {"bilinear", d.bilinear},
                      {"remainder", d.remainder}});
    }
    report["variation"] = rows;
  }

  {
    MultiplierTable table = MultiplierTable::build(4.5, 256);
    json rows = json::array();
    for (int k : {1, 2, 5, 17, 64, 256}) rows.push_back({{"k", k}, {"rho", table.rho(k)}});
    report["multiplier"] = {{"rho", rows},
                            {"asymptotic_constant", table.asymptotic().value},
                            {"error_bound", table.asymptotic().error_bound}};
  }

  {
    const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
    json cases = json::array();
    for (auto [p, q] : {std::pair{4.5, 2.0}, std::pair{3.0, 2.0}}) {
      std::vector<double> values;
      for (double d : deltas) values.push_back(two_strand_cross_energy(d, EnergyParams(p, q)));
      PowerLawFit fit = fit_power_law(deltas, values);
      cases.push_back({{"p", p}, {"q", q}, {"cross_energy", values}, {"fitted_exponent", fit.exponent},
                       {"loglog_slope", fit_loglog_slope(deltas, values)}});
    }
    report["two_strand"] = cases;
  }

  {
    json eights = json::array();
    for (double d : {0.2, 0.1, 0.05}) eights.push_back(bilipschitz_constant(make_primitive(FigureEight{d}, 256, 3)).constant);
    report["bilipschitz"] = {{"circle", bilipschitz_constant(make_primitive(Circle{}, 128)).constant},
                             {"figure_eight", eights}};
  }

  {
    ClosedCurve c = make_primitive(Circle{}, 256);
    report["beta_circle"] = {beta_number(c, 0, 0.2), beta_number(c, 17, 0.4)};
  }

  {
    FlowConfig config;
    config.precondition = true;
    config.max_iters = 40;
    ClosedCurve start = make_primitive(PerturbedCircle{0.05, 5}, 64);
    FlowTrace trace = run_flow(start, config);
    report["flow"] = {{"stop_reason", trace.stop_reason},
                      {"initial_energy", trace.rows.front().energy},
                      {"final_energy", trace.rows.back().energy},
                      {"non_round_before", non_round_energy(start)},
                      {"non_round_after", non_round_energy(trace.final_state->curve)}};
  }
  return report.dump(2) + "\n";
}

}  // namespace tpk
