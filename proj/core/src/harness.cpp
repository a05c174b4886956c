#include "llhmm/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "llhmm/expression.hpp"

namespace llhmm {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// epsilon entries are of the form 1/n (assumption: eps = l/n); plain decimals
/// are accepted when they match 1/round(1/x).
int parse_eps_n(const std::string& v, std::vector<std::string>& issues) {
  const std::string t = trim(v);
  if (t.rfind("1/", 0) == 0) {
    try {
      const int n = std::stoi(t.substr(2));
      if (n >= 2) return n;
    } catch (...) {
    }
    issues.push_back("epsilon '" + t + "' is not of the form 1/n");
    return 0;
  }
  try {
    const double x = std::stod(t);
    if (x > 0.0 && x < 1.0) {
      const int n = static_cast<int>(std::lround(1.0 / x));
      if (std::abs(1.0 / n - x) < 1e-12) return n;
    }
  } catch (...) {
  }
  issues.push_back("epsilon '" + t + "' is not of the form 1/n");
  return 0;
}

}  // namespace

Coefficient make_coefficient(const std::string& spec, int dim) {
  if (spec == "paper_1d") return Coefficient::paper_1d(1.0);
  if (spec == "paper_2d") return Coefficient::paper_2d(1.0);
  if (spec.rfind("constant:", 0) == 0) {
    return Coefficient::constant(std::stod(spec.substr(9)), dim);
  }
  if (spec.rfind("expr:", 0) == 0) {
    auto fn = compile_expression(spec.substr(5));
    return Coefficient(fn, dim, 1.0, "expr");
  }
  throw Error("unknown coefficient '" + spec +
              "' (expected paper_1d, paper_2d, constant:<c> or expr:<expression>)");
}

void SweepConfig::validate() const {
  std::vector<std::string> issues;
  if (dim < 1 || dim > 2) issues.push_back("dimension must be 1 or 2");
  if (eps_n.empty()) issues.push_back("epsilon list is empty");
  for (int n : eps_n) {
    if (n < 2) issues.push_back("epsilon 1/" + std::to_string(n) + " is not in (0, 1/2]");
  }
  if (mu.empty()) issues.push_back("mu list is empty");
  for (double m : mu) {
    if (!(m > 0.0) || m >= 0.5) issues.push_back("mu = " + std::to_string(m) + " outside (0, 0.5)");
  }
  if (eta.empty()) issues.push_back("eta list is empty");
  for (double e : eta) {
    if (!(e > 0.0)) issues.push_back("eta must be positive");
  }
  if (alpha.empty()) issues.push_back("alpha list is empty");
  for (double a : alpha) {
    if (!(a > 0.0) || a > 1.0) issues.push_back("alpha = " + std::to_string(a) + " outside (0, 1]");
  }
  if (kernels.empty()) issues.push_back("kernel list is empty");
  for (const auto& k : kernels) {
    if (k[0] < 0 || k[1] < 0 || k[2] < 0 || k[3] < 0) {
      issues.push_back("kernel orders must be nonnegative");
    }
    if (k[0] > 12 || k[2] > 12) issues.push_back("kernel p order above the conditioning guard 12");
  }
  if (points_per_eps < 4) issues.push_back("points_per_eps must be at least 4");
  if (!(cfl > 0.0) || cfl > 1.0) issues.push_back("cfl outside (0, 1]");
  if (jobs < 1) issues.push_back("jobs must be >= 1");
  try {
    make_coefficient(coefficient, dim);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  try {
    macro_preset(m_init, dim);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  if (!issues.empty()) throw ConfigInvalid(std::move(issues));
}

SweepConfig parse_config(std::istream& in) {
  SweepConfig cfg;
  cfg.eps_n.clear();
  std::vector<std::string> issues;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "dimension" || key == "dim") {
        cfg.dim = std::stoi(value);
      } else if (key == "coefficient") {
        cfg.coefficient = value;
      } else if (key == "m_init") {
        cfg.m_init = value;
      } else if (key == "epsilon") {
        const int n = parse_eps_n(value, issues);
        if (n > 0) cfg.eps_n.push_back(n);
      } else if (key == "mu") {
        cfg.mu.push_back(std::stod(value));
      } else if (key == "eta") {
        cfg.eta.push_back(std::stod(value));
      } else if (key == "alpha") {
        cfg.alpha.push_back(std::stod(value));
      } else if (key == "kernel") {
        std::istringstream ks(value);
        std::array<int, 4> k{};
        if (!(ks >> k[0] >> k[1] >> k[2] >> k[3])) {
          issues.push_back("line " + std::to_string(lineno) + ": kernel wants 'px qx pt qt'");
        } else {
          cfg.kernels.push_back(k);
        }
      } else if (key == "points_per_eps") {
        cfg.points_per_eps = std::stoi(value);
      } else if (key == "cfl") {
        cfg.cfl = std::stod(value);
      } else if (key == "scheme") {
        if (value == "rk4_project") {
          cfg.scheme = Scheme::rk4_project;
        } else if (value == "imex_midpoint") {
          cfg.scheme = Scheme::imex_midpoint;
        } else {
          issues.push_back("line " + std::to_string(lineno) + ": unknown scheme '" + value + "'");
        }
      } else if (key == "reference") {
        if (value == "discrete") {
          cfg.reference = ReferenceMode::discrete;
        } else if (value == "continuum") {
          cfg.reference = ReferenceMode::continuum;
        } else {
          issues.push_back("line " + std::to_string(lineno) + ": unknown reference '" + value +
                           "'");
        }
      } else if (key == "jobs") {
        cfg.jobs = std::stoi(value);
      } else if (key == "out") {
        cfg.out = value;
      } else {
        issues.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } catch (const std::exception&) {
      issues.push_back("line " + std::to_string(lineno) + ": cannot parse value '" + value +
                       "' for key '" + key + "'");
    }
  }
  if (!issues.empty()) throw ConfigInvalid(std::move(issues));
  return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigInvalid({"cannot open config file '" + path + "'"});
  }
  return parse_config(in);
}

namespace {

SweepConfig base_1d() {
  SweepConfig c;
  c.dim = 1;
  c.coefficient = "paper_1d";
  c.m_init = "helix";
  c.mu = {0.03};
  c.eta = {1.5e-4};
  c.alpha = {0.1};
  c.kernels = {{5, 7, 5, 7}};
  return c;
}

SweepConfig base_2d(bool large) {
  SweepConfig c;
  c.dim = 2;
  c.coefficient = "paper_2d";
  c.m_init = "helix2d";
  c.mu = {0.06};
  c.eta = {3.0e-4};
  c.alpha = {0.1};
  c.kernels = {{5, 7, 3, 7}};
  c.eps_n = large ? std::vector<int>{10, 20, 30, 40, 50, 60, 70}
                  : std::vector<int>{10, 20, 30, 40};
  return c;
}

std::vector<double> eta_ladder(int eps_n, std::initializer_list<double> factors) {
  std::vector<double> out;
  const double e2 = 1.0 / (static_cast<double>(eps_n) * eps_n);
  for (double f : factors) out.push_back(f * e2);
  return out;
}

}  // namespace

SweepConfig preset(const std::string& name, bool large) {
  if (name == "fig2") {
    // 1D epsilon ladder, both damping values: small-eps slope, E1 <= E2, E2 ~ E3.
    SweepConfig c = base_1d();
    c.eps_n = {20, 40, 60, 80, 100, 120, 140};
    if (large) c.eps_n.insert(c.eps_n.end(), {160, 180, 200, 240, 280});
    c.alpha = {0.01, 0.1};
    return c;
  }
  if (name == "fig3") {
    // 1D: initial decay slope follows q_t, insensitive to q_x.
    SweepConfig c = base_1d();
    c.eps_n = {60, 80, 100, 120, 140};
    c.kernels = {{5, 7, 5, 7}, {5, 3, 5, 7}, {5, 7, 5, 3}, {5, 7, 5, 1}};
    return c;
  }
  if (name == "fig4") {
    // 1D: low p_x / p_t floor the error at mu^{px+1} / eta^{pt+1}.
    SweepConfig c = base_1d();
    c.eps_n = {60, 80, 100, 120, 140};
    c.kernels = {{5, 7, 5, 7}, {1, 7, 5, 7}, {5, 7, 1, 7}};
    return c;
  }
  if (name == "fig5") {
    // 1D box study at fixed eps: eta ladder decreases then plateaus
    // (p_t = 1 turns back up); run with `fit --x eta`.
    SweepConfig c = base_1d();
    c.eps_n = {140};
    c.alpha = {0.1};
    c.eta = eta_ladder(140, {0.5, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64});
    c.kernels = {{5, 7, 5, 7}, {5, 7, 1, 7}};
    return c;
  }
  if (name == "fig6") {
    // 2D epsilon ladder: E1 considerably below E2/E3.
    return base_2d(large);
  }
  if (name == "fig7") {
    // 2D kernel parameter study.
    SweepConfig c = base_2d(large);
    c.kernels = {{5, 7, 3, 7}, {1, 7, 3, 7}, {5, 7, 1, 7}, {5, 7, 3, 3}};
    return c;
  }
  if (name == "fig8") {
    // 2D eta ladder at fixed eps.
    SweepConfig c = base_2d(large);
    c.eps_n = {20};
    if (large) c.eps_n = {70};
    c.eta = eta_ladder(c.eps_n[0], {0.5, 1, 2, 3, 4, 6, 8, 12, 16});
    c.alpha = {0.1};
    return c;
  }
  if (name == "fig9") {
    // 2D mu ladder at fixed eps.
    SweepConfig c = base_2d(large);
    c.eps_n = {20};
    if (large) c.eps_n = {70};
    const double eps = 1.0 / c.eps_n[0];
    c.mu = {1.5 * eps, 2.0 * eps, 3.0 * eps, 4.0 * eps, 6.0 * eps};
    c.eta = eta_ladder(c.eps_n[0], {6});
    c.alpha = {0.1};
    return c;
  }
  throw Error("unknown preset '" + name + "' (expected fig2..fig9)");
}

std::vector<std::pair<std::string, std::string>> preset_catalog() {
  return {
      {"fig2", "1D eps ladder, alpha in {0.01, 0.1}: small-eps slope of E1, E1 <= E2, E2 ~ E3"},
      {"fig3", "1D eps ladder across q_x/q_t: initial decay slope tracks q_t only"},
      {"fig4", "1D eps ladder across p_x/p_t: low p floors the error"},
      {"fig5", "1D eta ladder at eps = 1/140: decrease, plateau, p_t = 1 rises again"},
      {"fig6", "2D eps ladder: E1 considerably lower than E2, E3"},
      {"fig7", "2D kernel parameter study"},
      {"fig8", "2D eta ladder at fixed eps: decrease then plateau"},
      {"fig9", "2D mu ladder at fixed eps: decrease then near-constant"},
  };
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Coefficient coeff = make_coefficient(cfg.coefficient, cfg.dim);
  const MacroField m_init = macro_preset(cfg.m_init, cfg.dim);

  struct PointSpec {
    int eps_n;
    double mu, eta, alpha;
    std::array<int, 4> kernel;
  };
  std::vector<PointSpec> points;
  points.reserve(cfg.point_count());
  for (int n : cfg.eps_n) {
    for (double mu : cfg.mu) {
      for (double eta : cfg.eta) {
        for (double a : cfg.alpha) {
          for (const auto& k : cfg.kernels) {
            points.push_back({n, mu, eta, a, k});
          }
        }
      }
    }
  }

  std::vector<std::array<UpscalingReport, 3>> slots(points.size());
  std::vector<std::string> errors(points.size());

  auto work = [&](std::size_t i) {
    const PointSpec& p = points[i];
    try {
      UpscaleSetup setup{coeff, m_init, cfg.points_per_eps, cfg.cfl, cfg.scheme, cfg.reference};
      AveragingWindow window(p.mu, p.eta, p.kernel[0], p.kernel[1], p.kernel[2], p.kernel[3]);
      slots[i] = upscale_all(setup, p.eps_n, p.alpha, window);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  const int jobs = std::min<std::size_t>(cfg.jobs, points.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= points.size()) return;
          work(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  out.reports.reserve(points.size() * 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty()) {
      const PointSpec& p = points[i];
      std::ostringstream ps;
      ps << "epsilon=1/" << p.eps_n << " mu=" << p.mu << " eta=" << p.eta << " alpha=" << p.alpha
         << " kernel=" << p.kernel[0] << "," << p.kernel[1] << "," << p.kernel[2] << ","
         << p.kernel[3];
      out.failures.push_back({i, ps.str(), errors[i]});
      continue;
    }
    for (const auto& r : slots[i]) out.reports.push_back(r);
  }
  return out;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points, const std::string& abscissa) {
  if (points.size() < 3) {
    throw DegenerateFit("fit_rate: need at least 3 points");
  }
  RateFit fit;
  fit.abscissa = abscissa;
  fit.n_points = static_cast<int>(points.size());
  constexpr double kFloor = 1e-16;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, e] : points) {
    if (!(x > 0.0)) throw DegenerateFit("fit_rate: abscissa values must be positive");
    if (e <= 0.0) throw DegenerateFit("fit_rate: all values must be positive");
    double ec = e;
    if (ec < kFloor) {
      ec = kFloor;
      fit.clamped = true;
    }
    const double lx = std::log(x), ly = std::log(ec);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double n = static_cast<double>(points.size());
  const double vx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double vy = syy - sy * sy / n;
  if (vx <= 0.0) throw DegenerateFit("fit_rate: abscissa values are all equal");
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return fit;
}

namespace {

constexpr const char* kHeader =
    "model,epsilon,mu,eta,alpha,px,qx,pt,qt,N,dt,error,"
    "F0,F1,F2,F3,F4,F5,ref0,ref1,ref2,ref3,ref4,ref5";

}  // namespace

void emit(std::span<const UpscalingReport> reports, std::ostream& os) {
  os << kHeader << "\n";
  for (const auto& r : reports) {
    os << model_name(r.model) << ',' << fmt17(r.epsilon) << ',' << fmt17(r.mu) << ','
       << fmt17(r.eta) << ',' << fmt17(r.alpha) << ',' << r.px << ',' << r.qx << ',' << r.pt
       << ',' << r.qt << ',' << r.n << ',' << fmt17(r.dt) << ',' << fmt17(r.error);
    for (double f : r.F) os << ',' << fmt17(f);
    for (double f : r.ref) os << ',' << fmt17(f);
    os << "\n";
  }
}

void emit_file(std::span<const UpscalingReport> reports, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("emit: cannot open '" + path + "'");
  emit(reports, os);
  if (!os) throw Error("emit: write failure on '" + path + "'");
}

std::vector<UpscalingReport> load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("load: empty input");
  if (trim(line) != kHeader) throw Error("load: unexpected header");
  std::vector<UpscalingReport> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 24) throw Error("load: malformed row '" + line + "'");
    UpscalingReport r;
    r.model = model_from_name(f[0]);
    r.epsilon = std::stod(f[1]);
    r.mu = std::stod(f[2]);
    r.mu_requested = r.mu;
    r.eta = std::stod(f[3]);
    r.alpha = std::stod(f[4]);
    r.px = std::stoi(f[5]);
    r.qx = std::stoi(f[6]);
    r.pt = std::stoi(f[7]);
    r.qt = std::stoi(f[8]);
    r.n = std::stoi(f[9]);
    r.dt = std::stod(f[10]);
    r.error = std::stod(f[11]);
    for (int i = 0; i < 6; ++i) r.F[i] = std::stod(f[12 + i]);
    for (int i = 0; i < 6; ++i) r.ref[i] = std::stod(f[18 + i]);
    out.push_back(r);
  }
  return out;
}

std::vector<UpscalingReport> load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("load: cannot open '" + path + "'");
  return load(is);
}

}  // namespace llhmm
