#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llhmm/upscaling.hpp"

namespace llhmm {

/// Sweep over the Cartesian product of the parameter lists. Parsed from a
/// flat key-value file (one `key = value` per line, keys repeated for lists).
struct SweepConfig {
  int dim = 1;
  std::string coefficient = "paper_1d";  // paper_1d | paper_2d | constant:<c> | expr:<...>
  std::string m_init = "helix";          // helix | helix2d | constant_z
  std::vector<int> eps_n;                // epsilon = 1/n
  std::vector<double> mu;
  std::vector<double> eta;
  std::vector<double> alpha;
  std::vector<std::array<int, 4>> kernels;  // px qx pt qt
  int points_per_eps = 8;
  double cfl = 0.25;
  Scheme scheme = Scheme::rk4_project;
  ReferenceMode reference = ReferenceMode::discrete;
  int jobs = 1;
  std::string out;

  /// Throws ConfigInvalid with one entry per violated field.
  void validate() const;
  std::size_t point_count() const {
    return eps_n.size() * mu.size() * eta.size() * alpha.size() * kernels.size();
  }
};

SweepConfig parse_config(std::istream& in);
SweepConfig parse_config_file(const std::string& path);

/// Named parameter-study presets reproducing the reference studies; `large`
/// switches the reduced desk-scale ladders to the full ones.
SweepConfig preset(const std::string& name, bool large = false);
/// name -> one-line description of the qualitative feature each preset checks.
std::vector<std::pair<std::string, std::string>> preset_catalog();

struct SweepFailure {
  std::size_t point = 0;
  std::string parameters;
  std::string message;
};

struct SweepResult {
  std::vector<UpscalingReport> reports;   // product order, 3 models per point
  std::vector<SweepFailure> failures;
};

/// Execute the sweep; points run in parallel (config.jobs) with per-point
/// failure isolation, and reports are merged in deterministic product order
/// independent of the thread count.
SweepResult run_sweep(const SweepConfig& cfg);

struct RateFit {
  std::string abscissa;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n_points = 0;
  bool clamped = false;  // values at/below the quadrature floor were clamped
};

/// Least squares on (log x, log E). Throws DegenerateFit for fewer than 3
/// points or any E <= 0; values below 1e-16 are clamped to the floor and
/// flagged.
RateFit fit_rate(std::span<const std::pair<double, double>> points,
                 const std::string& abscissa = "x");

/// CSV with a fixed header and 17 significant digits (lossless round trip).
void emit(std::span<const UpscalingReport> reports, std::ostream& os);
void emit_file(std::span<const UpscalingReport> reports, const std::string& path);
std::vector<UpscalingReport> load(std::istream& is);
std::vector<UpscalingReport> load_file(const std::string& path);

/// The coefficient named by a config string.
Coefficient make_coefficient(const std::string& spec, int dim);

}  // namespace llhmm
