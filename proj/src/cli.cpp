#include "tpk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tpk/analysis.hpp"
#include "tpk/energy.hpp"
#include "tpk/error.hpp"
#include "tpk/flow.hpp"
#include "tpk/io.hpp"
#include "tpk/parallel.hpp"
#include "tpk/spectral.hpp"
#include "tpk/study.hpp"
#include "tpk/variation.hpp"

namespace tpk {
namespace {

constexpr int exit_domain = 2;
constexpr int exit_numerical = 3;

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_text(path, text);
}

void warn_regime(const EnergyParams& params, std::ostream& err) {
  if (params.regime() == Regime::non_repulsive)
    err << "warning: non-repulsive regime (p < q + 2): not a knot energy, computing anyway\n";
  else if (params.regime() == Regime::singular)
    err << "warning: singular regime (p >= 2q + 1): values diverge under refinement for non-straight curves\n";
}

Points parse_vertices(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream all(text);
  std::string vertex;
  while (std::getline(all, vertex, ';')) {
    std::vector<double> row;
    std::stringstream vs(vertex);
    std::string item;
    while (std::getline(vs, item, ',')) row.push_back(std::stod(item));
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.empty()) throw DomainError("--vertices: no vertices given");
  Points v(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw DomainError("--vertices: vertices differ in dimension");
    for (std::size_t c = 0; c < rows[r].size(); ++c) v(r, c) = rows[r][c];
  }
  return v;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tangent-point energies of closed curves"};
  app.require_subcommand(1);
  RunConfig config;
  std::string save_config;
  app.add_option("--threads", config.threads, "worker threads for the O(n^2) kernels (default: TPK_THREADS or all)");
  app.add_option("--save-config", save_config, "write the parsed configuration as JSON");

  // energy
  auto* energy = app.add_subcommand("energy", "evaluate TP^(p,q) of a curve file");
  std::string curve_path;
  bool richardson_flag = false, study_flag = false, unit_length = false;
  int terms = 1;
  energy->add_option("--curve", curve_path, "curve JSON file")->required();
  energy->add_option("--p", config.p, "chord exponent (default 4.5)");
  energy->add_option("--q", config.q, "tangent-distance exponent (default 2)");
  energy->add_option("--nodes", config.nodes, "number of quadrature nodes (default: curve samples)");
  energy->add_flag("--richardson", richardson_flag, "Richardson extrapolation over halved grids");
  energy->add_option("--terms", terms, "Richardson correction terms (default 1)");
  energy->add_flag("--study", study_flag, "print a refinement table");
  energy->add_flag("--unit-length", unit_length, "rescale the curve to length 1 first");

  // gradient-check
  auto* gcheck = app.add_subcommand("gradient-check", "compare the discrete gradient with finite differences");
  int trials = 10;
  gcheck->add_option("--curve", curve_path, "curve JSON file")->required();
  gcheck->add_option("--p", config.p, "chord exponent (default 4.5)");
  gcheck->add_option("--q", config.q, "tangent-distance exponent (default 2)");
  gcheck->add_option("--trials", trials, "random directions (default 10)");
  gcheck->add_option("--seed", config.seed, "random seed (default 7)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "multiplier table rho_k as CSV");
  int kmax = 256;
  double lambda = 0.0;
  spectrum->add_option("--p", config.p, "exponent in (3, 5) (default 4.5)");
  spectrum->add_option("--kmax", kmax, "largest wavenumber (default 256)");
  spectrum->add_option("--lambda", lambda, "length multiplier in 2 rho_k + lambda (2 pi k)^2 (default 0)");
  spectrum->add_option("--out", config.out, "output file (default stdout)");

  // flow
  auto* flow = app.add_subcommand("flow", "fixed-length gradient descent");
  FlowConfig fc;
  std::string trace_path, snap_dir;
  int snapshot_every = 0;
  flow->add_option("--curve", curve_path, "curve JSON file")->required();
  flow->add_option("--p", config.p, "chord exponent (default 4.5)");
  flow->add_option("--q", config.q, "tangent-distance exponent (default 2)");
  flow->add_option("--steps", fc.max_iters, "maximum accepted steps (default 500)");
  flow->add_flag("--precondition", fc.precondition, "divide by the Euler-Lagrange symbol");
  flow->add_option("--tol", fc.tol_grad, "stop when the projected gradient norm is below this (default 1e-6)");
  flow->add_option("--guard", fc.min_distance_guard, "minimum strand distance (default 1e-3)");
  flow->add_option("--resample-every", fc.resample_every, "arc-length resampling cadence (default 10)");
  flow->add_option("--trace", trace_path, "trace CSV output");
  flow->add_option("--snapshot-every", snapshot_every, "write a curve JSON every N steps");
  flow->add_option("--snap-dir", snap_dir, "directory for snapshots");
  flow->add_option("--out", config.out, "final curve JSON");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "geometric diagnostics");
  std::string kind;
  std::vector<double> radii;
  double alpha = 0.0, s_order = 0.0, rho_exp = 0.0;
  analyze->add_option("kind", kind, "beta | seminorm | bilip | holder")
      ->required()
      ->check(CLI::IsMember({"beta", "seminorm", "bilip", "holder"}));
  analyze->add_option("--curve", curve_path, "curve JSON file")->required();
  analyze->add_option("--p", config.p, "chord exponent (default 4.5)");
  analyze->add_option("--q", config.q, "tangent-distance exponent (default 2)");
  analyze->add_option("--radii", radii, "beta: radii d (default 1/64, 1/32, 1/16 of the length)");
  analyze->add_option("--s", s_order, "seminorm: order s (default (p-1)/q - 1)");
  analyze->add_option("--rho", rho_exp, "seminorm: integrability (default q)");
  analyze->add_option("--alpha", alpha, "holder: exponent (default (p-q-2)/q)");
  analyze->add_option("--out", config.out, "output file (default stdout)");

  // make-curve
  auto* make = app.add_subcommand("make-curve", "sample a primitive curve");
  std::string shape, vertices;
  int dim = 0;
  double radius = 1.0, ea = 2.0, eb = 1.0, major = 2.0, minor = 1.0, amplitude = 0.05, offset = 0.1;
  int wa = 2, wb = 3, mode = 5;
  bool arclength = false;
  make->add_option("kind", shape, "circle | ellipse | torus-knot | perturbed-circle | polygon | figure-eight")
      ->required()
      ->check(CLI::IsMember({"circle", "ellipse", "torus-knot", "perturbed-circle", "polygon", "figure-eight"}));
  make->add_option("--n", config.nodes, "samples (default 256)");
  make->add_option("--dim", dim, "ambient dimension (default 2, or 3 for knots)");
  make->add_option("--radius", radius, "circle radius (default 1)");
  make->add_option("--a", ea, "ellipse semi-axis a (default 2)");
  make->add_option("--b", eb, "ellipse semi-axis b (default 1)");
  make->add_option("--wind-a", wa, "torus knot: turns around the axis (default 2)");
  make->add_option("--wind-b", wb, "torus knot: turns through the hole (default 3)");
  make->add_option("--major", major, "torus knot major radius (default 2)");
  make->add_option("--minor", minor, "torus knot minor radius (default 1)");
  make->add_option("--amplitude", amplitude, "perturbed circle amplitude (default 0.05)");
  make->add_option("--mode", mode, "perturbed circle mode (default 5)");
  make->add_option("--offset", offset, "figure eight strand offset (default 0.1)");
  make->add_option("--vertices", vertices, "polygon vertices \"x,y;x,y;...\"");
  make->add_flag("--arclength", arclength, "resample to uniform speed");
  make->add_option("--out", config.out, "output file (default stdout)");

  // pair-energy
  auto* pair = app.add_subcommand("pair-energy", "energy of two curves including cross terms");
  std::string curve_b;
  pair->add_option("--curve-a", curve_path, "first curve JSON")->required();
  pair->add_option("--curve-b", curve_b, "second curve JSON")->required();
  pair->add_option("--p", config.p, "chord exponent (default 4.5)");
  pair->add_option("--q", config.q, "tangent-distance exponent (default 2)");

  // study
  auto* study = app.add_subcommand("study", "deterministic report of the main checks");
  study->add_option("--seed", config.seed, "random seed (default 7)");
  study->add_option("--out", config.out, "report file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_domain;
  }

  try {
    if (config.threads > 0) set_thread_count(config.threads);
    CLI::App* sub = app.get_subcommands().front();
    config.command = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      std::string joined;
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
      config.options.emplace_back(opt->get_name(), joined);
    }
    if (!save_config.empty()) write_text(save_config, config.to_text());

    if (sub == energy) {
      EnergyParams params(config.p, config.q);
      warn_regime(params, err);
      ClosedCurve c = read_curve(curve_path);
      if (unit_length) c = transform(c, 1.0 / c.length());
      QuadratureSpec quad;
      quad.n_offsets = config.nodes;
      if (richardson_flag) {
        quad.rule = QuadratureRule::trapezoid_richardson;
        quad.richardson_terms = terms;
      }
      out << "energy " << format_double(tp_energy(c, params, quad)) << "\n";
      out << "regime " << to_string(params.regime()) << "\n";
      if (study_flag) {
        const int n = config.nodes > 0 ? config.nodes : c.size();
        out << "n,energy,difference\n";
        double prev = NAN;
        for (int m = std::max(8, n / 8); m <= n; m *= 2) {
          QuadratureSpec q = quad;
          q.rule = QuadratureRule::trapezoid_diagonal_excluded;
          q.n_offsets = m;
          double e = tp_energy(c, params, q);
          out << m << "," << format_double(e) << "," << format_double(e - prev) << "\n";
          prev = e;
        }
      }
      return 0;
    }

    if (sub == gcheck) {
      EnergyParams params(config.p, config.q);
      warn_regime(params, err);
      if (trials < 1) throw DomainError("--trials must be positive");
      ClosedCurve c = read_curve(curve_path);
      std::mt19937_64 rng(config.seed);
      DiscreteGradient g = discrete_gradient(c, params);
      const double tau = 1e-4 * (1.0 + c.samples().cwiseAbs().maxCoeff());
      double worst = 0.0;
      out << "trial,finite_difference,gradient,relative_error\n";
      for (int t = 0; t < trials; ++t) {
        Points h = random_smooth_field(c.size(), c.dim(), rng);
        double fd = (tp_energy(ClosedCurve(c.samples() + tau * h, c.rule()), params) -
                     tp_energy(ClosedCurve(c.samples() - tau * h, c.rule()), params)) / (2.0 * tau);
        double paired = l2_inner(g.values, h);
        double rel = std::abs(paired - fd) / std::max(std::abs(fd), 1e-300);
        worst = std::max(worst, rel);
        out << t << "," << format_double(fd) << "," << format_double(paired) << "," << format_double(rel) << "\n";
      }
      if (worst > 1e-4) {
        err << "gradient check failed: worst relative error " << format_double(worst) << "\n";
        return exit_numerical;
      }
      return 0;
    }

    if (sub == spectrum) {
      if (lambda < 0.0) throw DomainError("--lambda must be nonnegative");
      if (!(config.p > 3.0 && config.p < 5.0)) throw DomainError("--p must lie in (3, 5) for the multiplier");
      if (kmax < 0) throw DomainError("--kmax must be nonnegative");
      MultiplierTable table = MultiplierTable::build(config.p, kmax);
      Table t{{"k", "rho_k", "rho_k_over_k_pow", "rho_tilde_k"}, {}};
      for (int k = 0; k <= kmax; ++k) {
        double r = table.rho(k);
        t.rows.push_back({double(k), r, k == 0 ? 0.0 : r / std::pow(k, config.p - 1.0),
                          el_multiplier(k, table, lambda)});
      }
      emit(table_to_csv(t), config.out, out);
      return 0;
    }

    if (sub == flow) {
      fc.params = EnergyParams(config.p, config.q);
      warn_regime(fc.params, err);
      ClosedCurve c = read_curve(curve_path);
      if (snapshot_every > 0 && snap_dir.empty()) throw DomainError("--snapshot-every needs --snap-dir");
      if (!snap_dir.empty()) std::filesystem::create_directories(snap_dir);
      FlowObserver observer;
      if (snapshot_every > 0) {
        observer = [&](const FlowState& s) {
          if (s.iter % snapshot_every != 0) return;
          char name[64];
          std::snprintf(name, sizeof name, "step_%06d.json", s.iter);
          write_curve(s.curve, (std::filesystem::path(snap_dir) / name).string());
        };
      }
      FlowTrace trace = run_flow(c, fc, observer);
      if (!trace_path.empty()) write_text(trace_path, trace_to_csv(trace.rows));
      if (!config.out.empty()) write_curve(trace.final_state->curve, config.out);
      const TraceRow& last = trace.rows.back();
      out << "stop " << trace.stop_reason << "\n";
      out << "iterations " << last.iter << "\n";
      out << "energy " << format_double(trace.rows.front().energy) << " -> " << format_double(last.energy) << "\n";
      out << "grad_norm " << format_double(last.grad_norm) << "\n";
      out << "min_dist " << format_double(last.min_dist) << "\n";
      return 0;
    }

    if (sub == analyze) {
      EnergyParams params(config.p, config.q);
      ClosedCurve c = read_curve(curve_path);
      Table t;
      if (kind == "beta") {
        if (radii.empty()) radii = {c.length() / 64.0, c.length() / 32.0, c.length() / 16.0};
        BetaProfile prof = beta_profile(c, params, radii);
        t.header = {"d", "sup_beta"};
        for (std::size_t k = 0; k < prof.radii.size(); ++k) t.rows.push_back({prof.radii[k], prof.sup_beta[k]});
        err << "fitted_exponent " << format_double(prof.fitted_exponent) << " kappa " << format_double(prof.kappa)
            << "\n";
      } else if (kind == "seminorm") {
        double s = s_order > 0.0 ? s_order : (config.p - 1.0) / config.q - 1.0;
        double r = rho_exp > 0.0 ? rho_exp : config.q;
        t.header = {"s", "rho", "seminorm"};
        t.rows.push_back({s, r, sobolev_seminorm(c.first(), s, r)});
      } else if (kind == "bilip") {
        BiLipschitz b = bilipschitz_constant(c);
        t.header = {"constant", "i", "j"};
        t.rows.push_back({b.constant, double(b.i), double(b.j)});
      } else {
        double a = alpha > 0.0 ? alpha : (config.p - config.q - 2.0) / config.q;
        Points unit = c.first();
        for (int j = 0; j < c.size(); ++j) unit.row(j) /= c.speed()[j];
        t.header = {"alpha", "holder"};
        t.rows.push_back({a, holder_estimate(unit, a)});
      }
      emit(table_to_csv(t), config.out, out);
      return 0;
    }

    if (sub == make) {
      const int n = config.nodes > 0 ? config.nodes : 256;
      Primitive prim;
      int default_dim = 2;
      if (shape == "circle") {
        prim = Circle{radius};
      } else if (shape == "ellipse") {
        prim = Ellipse{ea, eb};
      } else if (shape == "torus-knot") {
        prim = TorusKnot{wa, wb, major, minor};
        default_dim = 3;
      } else if (shape == "perturbed-circle") {
        prim = PerturbedCircle{amplitude, mode};
      } else if (shape == "figure-eight") {
        prim = FigureEight{offset};
        default_dim = 3;
      } else {
        if (vertices.empty()) throw DomainError("--vertices is required for polygon");
        Points v = parse_vertices(vertices);
        default_dim = static_cast<int>(v.cols());
        prim = Polygon{v};
      }
      ClosedCurve c = make_primitive(prim, n, dim > 0 ? dim : default_dim);
      if (arclength) c = resample_arclength(c, n);
      emit(curve_to_json(c), config.out, out);
      return 0;
    }

    if (sub == pair) {
      EnergyParams params(config.p, config.q);
      warn_regime(params, err);
      PairEnergy e = pair_energy(read_curve(curve_path), read_curve(curve_b), params);
      out << "self_a " << format_double(e.self_a) << "\n";
      out << "self_b " << format_double(e.self_b) << "\n";
      out << "cross_ab " << format_double(e.cross_ab) << "\n";
      out << "cross_ba " << format_double(e.cross_ba) << "\n";
      out << "total " << format_double(e.total) << "\n";
      return 0;
    }

    if (sub == study) {
      emit(run_study(config.seed), config.out, out);
      return 0;
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return exit_domain;
  } catch (const SelfIntersectionError& e) {
    err << "numerical error: " << e.what() << " (samples " << e.first() << ", " << e.second() << ")\n";
    return exit_numerical;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::invalid_argument& e) {
    err << "error: bad number: " << e.what() << "\n";
    return exit_domain;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_domain;
  }
  return exit_domain;
}

int parse_and_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_and_dispatch(args, std::cout, std::cerr);
}

}  // namespace tpk
