#pragma once

// Monte Carlo convergence sweeps with coupled fine-grid paths.
//
// For every trajectory one fine Brownian path set is sampled and folded once;
// all coarse step counts see restrictions of that same array, so
//   e_N = sqrt( (1/M) sum_traj ||u^{N/2}(T) - u^N(T)||^2 )
// measures discretization error rather than sampling noise, and
//   r_N = log2(e_{N/2} / e_N).

#include "idmbdf/spectral_space.hpp"
#include "idmbdf/stepper.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace idmbdf {

/// Invalid configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration exceeds the resource limits (CLI exit code 3).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  SchemeKind scheme = SchemeKind::ID2_BDF2;
  std::vector<double> alpha_list{1.7};
  std::vector<double> gamma_list{0.9};
  std::vector<std::size_t> N_list{64, 128, 256, 512};
  std::size_t trajectories = 200;
  int l = 100;
  std::size_t J = 100;
  int fine_L = 14;
  std::uint64_t seed = 42;
  double T = 1.0;
  double sigma_exponent = 2.0;
  unsigned workers = 0;    // 0: hardware concurrency
  bool zero_noise = false;  // deterministic run, no paths sampled

  // Initial data; when absent the reference data
  //   upsilon(x) = sin(x) sqrt(1 - x^2),  b(x) = cos(x) sqrt(1 - x^2)
  // is projected onto J modes.
  std::optional<ModeField> upsilon;
  std::optional<ModeField> velocity;

  std::size_t fine_steps() const { return std::size_t{1} << fine_L; }

  /// Throws ConfigError.
  void validate() const;
  /// Throws ResourceError when the run would exceed the built-in limits.
  void check_resources() const;
};

/// Desk-scale defaults or the full reference protocol (M = 1000, fine_L = 20).
ExperimentConfig paper_scale(ExperimentConfig cfg);

double reference_upsilon(double x);
double reference_velocity(double x);

struct CellResult {
  double alpha = 0.0;
  double gamma = 0.0;
  bool stability_warning = false;
  std::vector<std::size_t> N;               // N_list[1..]
  std::vector<double> errors;               // e_N
  std::vector<std::optional<double>> rates;  // undefined for the first entry
  std::vector<double> mean_sq;              // (1/M) sum ||.||^2
  std::vector<double> std_err_sq;           // standard error of mean_sq

  /// Mean of the last `count` defined rates.
  double mean_finest_rates(std::size_t count = 2) const;
};

struct ConvergenceReport {
  SchemeKind scheme = SchemeKind::ID2_BDF2;
  std::uint64_t seed = 0;
  std::size_t trajectories = 0;
  int l = 0;
  std::size_t J = 0;
  int fine_L = 0;
  bool zero_noise = false;
  double wall_seconds = 0.0;
  std::vector<CellResult> cells;

  const CellResult& cell(double alpha, double gamma) const;
};

ConvergenceReport run_sweep(const ExperimentConfig& cfg);

/// log2(errors[i-1] / errors[i]); the first entry is undefined.
std::vector<std::optional<double>> convergence_rates(const std::vector<double>& errors);

enum class ReportFormat { Csv, Tsv, JsonLines };
ReportFormat parse_format(const std::string& name);

/// One row per (alpha, gamma, N): alpha, gamma, N, error, rate, seed, M.
void emit_report(const ConvergenceReport& report, ReportFormat format, const std::filesystem::path& file);
std::string format_report(const ConvergenceReport& report, ReportFormat format);

struct TruncationReport {
  double alpha = 0.0;
  double gamma = 0.0;
  std::size_t N = 0;
  int l_ref = 0;
  std::size_t trajectories = 0;
  std::vector<int> l;
  std::vector<double> mean_sq;     // E ||u_l(T) - u_{l_ref}(T)||^2
  std::vector<double> std_err_sq;
  double fitted_slope = 0.0;       // least squares of log mean_sq against log l
};

/// Uses the first (alpha, gamma) cell, N = N_list.back() and l_ref = cfg.l.
/// Mode substreams make the truncations nested: u_l and u_{l_ref} share the
/// paths of modes 1..l.
TruncationReport truncation_study(const ExperimentConfig& cfg, const std::vector<int>& l_list);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DeterministicOrderReport {
  SchemeKind scheme = SchemeKind::ID2_BDF2;
  double alpha = 0.0;
  double oracle = 0.0;  // u(T)
  std::vector<std::size_t> N;
  std::vector<double> errors;  // |u^N(T) - u(T)|
  std::vector<std::optional<double>> rates;
};

/// Zero noise, one mode (lambda = pi^2) with the given coefficients, compared
/// against u(T) = E_{a,1}(-lambda T^a) upsilon + T E_{a,2}(-lambda T^a) b.
DeterministicOrderReport deterministic_order(SchemeKind scheme, double alpha, const std::vector<std::size_t>& N_list,
                                             double upsilon_coeff = 1.0, double b_coeff = 1.0, double T = 1.0);

}  // namespace idmbdf
