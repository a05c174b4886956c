// Command line harness: kernel construction dumps, cell-problem solves,
// corrector spectra, micro windows, single-point upscaling, sweeps and rate
// fits. Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "llhmm/cell.hpp"
#include "llhmm/corrector.hpp"
#include "llhmm/errors.hpp"
#include "llhmm/harness.hpp"
#include "llhmm/kernels.hpp"
#include "llhmm/micro.hpp"
#include "llhmm/snapshot.hpp"
#include "llhmm/upscaling.hpp"

namespace {

using namespace llhmm;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error("cannot open output file '" + path + "'");
  return file;
}

int parse_eps(const std::string& s) {
  if (s.rfind("1/", 0) == 0) return std::stoi(s.substr(2));
  const double x = std::stod(s);
  const int n = static_cast<int>(std::lround(1.0 / x));
  if (!(x > 0.0) || std::abs(1.0 / n - x) > 1e-12) {
    throw ConfigInvalid({"epsilon must be of the form 1/n"});
  }
  return n;
}

int run_kernel(const std::string& family, int p, int q, const std::string& out_path) {
  Kernel k = family == "one_sided" ? Kernel::one_sided(p, q) : Kernel::symmetric(p, q);
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  os << "p,q,family,j,c_j,moment_r,residual_r\n";
  const auto c = k.ansatz_coeffs();
  const auto m = k.moments();
  for (int j = 0; j <= p; ++j) {
    const double target = j == 0 ? 1.0 : 0.0;
    os << p << ',' << q << ',' << family << ',' << j << ',' << fmt17(c[j]) << ','
       << fmt17(m[j]) << ',' << fmt17(std::abs(m[j] - target)) << "\n";
  }
  return 0;
}

int run_cell(const std::string& coeff, int dim, int n, const std::string& format,
             const std::string& out_path) {
  const Coefficient a = make_coefficient(coeff, dim);
  CellSolution sol = solve_cell(a, n);
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  const int d = sol.grid.dim;
  if (format == "jsonl") {
    nlohmann::json j;
    j["coefficient"] = a.name();
    j["n"] = n;
    j["dim"] = d;
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        j["AH"][r * d + c] = sol.AH(r, c);
      }
    }
    j["asymmetry"] = sol.asymmetry;
    j["cg_residual"] = sol.cg_residual;
    j["cg_iterations"] = sol.cg_iterations;
    j["div_g_residual"] = sol.div_g_residual();
    os << j.dump() << "\n";
  } else {
    os << "coefficient,n,dim,i,j,AH_ij,asymmetry,cg_residual,cg_iterations,div_g_residual\n";
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        os << a.name() << ',' << n << ',' << d << ',' << r << ',' << c << ','
           << fmt17(sol.AH(r, c)) << ',' << fmt17(sol.asymmetry) << ','
           << fmt17(sol.cg_residual) << ',' << sol.cg_iterations << ','
           << fmt17(sol.div_g_residual()) << "\n";
      }
    }
  }
  return 0;
}

int run_corrector(const std::string& coeff, int dim, int n, int jmax,
                  const std::string& out_path) {
  const Coefficient a = make_coefficient(coeff, dim);
  EigenBasis basis = eigendecompose(a, n, jmax);
  CellSolution cell = solve_cell(a, n);
  CorrectorModes modes = expand_chi(basis, cell);
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  os << "j,omega_j,chi_j_norm\n";
  for (int j = 0; j < basis.count(); ++j) {
    double m2 = 0.0;
    for (int k = 0; k < dim; ++k) m2 += modes.chi[j][k] * modes.chi[j][k];
    os << j << ',' << fmt17(basis.omega[j]) << ',' << fmt17(std::sqrt(m2)) << "\n";
  }
  std::cerr << "truncation error: " << modes.truncation_error << "\n";
  return 0;
}

int run_micro(const std::string& coeff, const std::string& init, int dim, int eps_n, double alpha,
              double eta, int ppe, double cfl, const std::string& scheme,
              const std::string& snapshot_path) {
  const double eps = 1.0 / eps_n;
  const Coefficient a = make_coefficient(coeff, dim).with_epsilon(eps);
  PeriodicGrid grid(dim, ppe * eps_n, 1.0);
  auto op = std::make_shared<FluxStencil>(grid, a, ppe);
  const MacroField M = macro_preset(init, dim);
  LLState state(sample_macro(M, grid), alpha, op);
  StepControl ctl = StepControl::for_window(
      *op, eta, cfl, scheme == "imex_midpoint" ? Scheme::imex_midpoint : Scheme::rk4_project);

  const double e0 = op->energy(state.m);
  solve_window(state, eta, ctl);
  const double e1 = op->energy(state.m);

  std::cout << "t=" << fmt17(state.t) << " steps=" << std::lround(eta / ctl.dt)
            << " dt=" << fmt17(ctl.dt) << " unit_dev=" << fmt17(state.m.max_unit_deviation())
            << " energy0=" << fmt17(e0) << " energy1=" << fmt17(e1) << "\n";
  if (!snapshot_path.empty()) {
    write_snapshot(snapshot_path, Snapshot{state.t, state.m, std::nullopt});
    std::cerr << "snapshot written to " << snapshot_path << "\n";
  }
  return 0;
}

int run_upscale(const std::string& coeff, const std::string& init, int dim, int eps_n,
                double alpha, double mu, double eta, std::vector<int> orders, int ppe, double cfl,
                const std::string& reference, const std::string& out_path) {
  UpscaleSetup setup{make_coefficient(coeff, dim), macro_preset(init, dim), ppe, cfl,
                     Scheme::rk4_project,
                     reference == "continuum" ? ReferenceMode::continuum
                                              : ReferenceMode::discrete};
  AveragingWindow window(mu, eta, orders[0], orders[1], orders[2], orders[3]);
  const auto reports = upscale_all(setup, eps_n, alpha, window);
  if (std::abs(reports[0].mu - mu) > 1e-15) {
    std::cerr << "mu snapped to " << fmt17(reports[0].mu) << "\n";
  }
  if (!reports[0].preconditions_met) {
    std::cerr << "note: eps < mu < 1, eps^2 < eta preconditions not met at this point\n";
  }
  std::ofstream file;
  std::ostream& os = open_out(out_path, file);
  emit(reports, os);
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& preset_name, bool large,
                  int jobs_override, const std::string& out_path) {
  SweepConfig cfg;
  if (!preset_name.empty()) {
    cfg = preset(preset_name, large);
  } else if (!config_path.empty()) {
    cfg = parse_config_file(config_path);
  } else {
    throw ConfigInvalid({"sweep needs --preset or --config"});
  }
  if (jobs_override > 0) cfg.jobs = jobs_override;
  if (!out_path.empty()) cfg.out = out_path;

  SweepResult result = run_sweep(cfg);
  std::ofstream file;
  std::ostream& os = open_out(cfg.out, file);
  emit(result.reports, os);
  for (const auto& f : result.failures) {
    std::cerr << "point " << f.point << " failed (" << f.parameters << "): " << f.message << "\n";
  }
  return result.failures.empty() ? 0 : 3;
}

int run_fit(const std::string& csv_path, const std::string& model, const std::string& x_name,
            double xmin, double xmax, double alpha_filter, int pt_filter, int qt_filter) {
  const auto reports = load_file(csv_path);
  const Model m = model_from_name(model);
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : reports) {
    if (r.model != m) continue;
    if (alpha_filter > 0.0 && std::abs(r.alpha - alpha_filter) > 1e-12) continue;
    if (pt_filter >= 0 && r.pt != pt_filter) continue;
    if (qt_filter >= 0 && r.qt != qt_filter) continue;
    double x = 0.0;
    if (x_name == "epsilon") {
      x = r.epsilon;
    } else if (x_name == "eta") {
      x = r.eta;
    } else if (x_name == "mu") {
      x = r.mu;
    } else {
      throw ConfigInvalid({"--x must be epsilon, eta or mu"});
    }
    if (x < xmin || x > xmax) continue;
    pts.emplace_back(x, r.error);
  }
  const RateFit fit = fit_rate(pts, x_name);
  std::cout << "abscissa=" << fit.abscissa << " slope=" << fmt17(fit.slope)
            << " intercept=" << fmt17(fit.intercept) << " r2=" << fmt17(fit.r2)
            << " points=" << fit.n_points << (fit.clamped ? " (clamped)" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous multiscale upscaling for the Landau-Lifshitz equation"};
  app.require_subcommand(1);

  // kernel
  auto* kernel_cmd = app.add_subcommand("kernel", "print kernel coefficients and moments as CSV");
  std::string k_family = "one_sided";
  int k_p = 0, k_q = 0;
  std::string k_out;
  kernel_cmd->add_option("--family", k_family)->check(CLI::IsMember({"one_sided", "symmetric"}));
  kernel_cmd->add_option("--p", k_p)->required();
  kernel_cmd->add_option("--q", k_q)->required();
  kernel_cmd->add_option("--out", k_out);

  // cell
  auto* cell_cmd = app.add_subcommand("cell", "solve the cell problem and print A^H");
  std::string c_coeff = "paper_1d", c_format = "csv", c_out;
  int c_dim = 1, c_n = 256;
  cell_cmd->add_option("--coefficient", c_coeff);
  cell_cmd->add_option("--dim", c_dim)->check(CLI::Range(1, 2));
  cell_cmd->add_option("--n", c_n);
  cell_cmd->add_option("--format", c_format)->check(CLI::IsMember({"csv", "jsonl"}));
  cell_cmd->add_option("--out", c_out);

  // corrector
  auto* corr_cmd = app.add_subcommand("corrector", "dump (omega_j, |chi_j|) spectra as CSV");
  std::string r_coeff = "paper_1d", r_out;
  int r_dim = 1, r_n = 64, r_jmax = 0;
  corr_cmd->add_option("--coefficient", r_coeff);
  corr_cmd->add_option("--dim", r_dim)->check(CLI::Range(1, 2));
  corr_cmd->add_option("--n", r_n);
  corr_cmd->add_option("--jmax", r_jmax);
  corr_cmd->add_option("--out", r_out);

  // micro
  auto* micro_cmd = app.add_subcommand("micro", "run one micro window");
  std::string m_coeff = "paper_1d", m_init = "helix", m_eps = "1/140", m_scheme = "rk4_project";
  std::string m_snap;
  int m_dim = 1, m_ppe = 8;
  double m_alpha = 0.05, m_eta = 1.5e-4, m_cfl = 0.25;
  micro_cmd->add_option("--coefficient", m_coeff);
  micro_cmd->add_option("--m-init", m_init);
  micro_cmd->add_option("--dim", m_dim)->check(CLI::Range(1, 2));
  micro_cmd->add_option("--epsilon", m_eps);
  micro_cmd->add_option("--alpha", m_alpha);
  micro_cmd->add_option("--eta", m_eta);
  micro_cmd->add_option("--points-per-eps", m_ppe);
  micro_cmd->add_option("--cfl", m_cfl);
  micro_cmd->add_option("--scheme", m_scheme)
      ->check(CLI::IsMember({"rk4_project", "imex_midpoint"}));
  micro_cmd->add_option("--snapshot", m_snap);

  // upscale
  auto* up_cmd = app.add_subcommand("upscale", "single-point upscaling report (all models)");
  std::string u_coeff = "paper_1d", u_init = "helix", u_eps = "1/140", u_ref = "discrete", u_out;
  int u_dim = 1, u_ppe = 8;
  double u_alpha = 0.1, u_mu = 0.03, u_eta = 1.5e-4, u_cfl = 0.25;
  std::vector<int> u_orders = {5, 7, 5, 7};
  up_cmd->add_option("--coefficient", u_coeff);
  up_cmd->add_option("--m-init", u_init);
  up_cmd->add_option("--dim", u_dim)->check(CLI::Range(1, 2));
  up_cmd->add_option("--epsilon", u_eps);
  up_cmd->add_option("--alpha", u_alpha);
  up_cmd->add_option("--mu", u_mu);
  up_cmd->add_option("--eta", u_eta);
  up_cmd->add_option("--kernel", u_orders, "px qx pt qt")->expected(4);
  up_cmd->add_option("--points-per-eps", u_ppe);
  up_cmd->add_option("--cfl", u_cfl);
  up_cmd->add_option("--reference", u_ref)->check(CLI::IsMember({"discrete", "continuum"}));
  up_cmd->add_option("--out", u_out);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep from config or preset");
  std::string s_config, s_preset, s_out;
  int s_jobs = 0;
  bool s_large = false;
  sweep_cmd->add_option("--config", s_config);
  sweep_cmd->add_option("--preset", s_preset);
  sweep_cmd->add_flag("--large", s_large, "full ladders instead of desk-scale ones");
  sweep_cmd->add_option("--jobs", s_jobs);
  sweep_cmd->add_option("--out", s_out);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "log-log rate fit over a report CSV");
  std::string f_csv, f_model = "M1", f_x = "epsilon";
  double f_xmin = 0.0, f_xmax = 1e300, f_alpha = 0.0;
  int f_pt = -1, f_qt = -1;
  fit_cmd->add_option("csv", f_csv)->required();
  fit_cmd->add_option("--model", f_model);
  fit_cmd->add_option("--x", f_x);
  fit_cmd->add_option("--xmin", f_xmin);
  fit_cmd->add_option("--xmax", f_xmax);
  fit_cmd->add_option("--alpha", f_alpha, "keep only rows with this damping");
  fit_cmd->add_option("--pt", f_pt, "keep only rows with this temporal moment order");
  fit_cmd->add_option("--qt", f_qt, "keep only rows with this temporal smoothness order");

  // presets listing
  auto* presets_cmd = app.add_subcommand("presets", "list sweep presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (kernel_cmd->parsed()) return run_kernel(k_family, k_p, k_q, k_out);
    if (cell_cmd->parsed()) return run_cell(c_coeff, c_dim, c_n, c_format, c_out);
    if (corr_cmd->parsed()) return run_corrector(r_coeff, r_dim, r_n, r_jmax, r_out);
    if (micro_cmd->parsed()) {
      return run_micro(m_coeff, m_init, m_dim, parse_eps(m_eps), m_alpha, m_eta, m_ppe, m_cfl,
                       m_scheme, m_snap);
    }
    if (up_cmd->parsed()) {
      return run_upscale(u_coeff, u_init, u_dim, parse_eps(u_eps), u_alpha, u_mu, u_eta, u_orders,
                         u_ppe, u_cfl, u_ref, u_out);
    }
    if (sweep_cmd->parsed()) return run_sweep_cmd(s_config, s_preset, s_large, s_jobs, s_out);
    if (fit_cmd->parsed()) {
      return run_fit(f_csv, f_model, f_x, f_xmin, f_xmax, f_alpha, f_pt, f_qt);
    }
    if (presets_cmd->parsed()) {
      for (const auto& [name, doc] : preset_catalog()) {
        std::cout << name << ": " << doc << "\n";
      }
      return 0;
    }
  } catch (const llhmm::ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const llhmm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
