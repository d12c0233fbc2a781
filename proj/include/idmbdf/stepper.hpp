#pragma once

// IDm-BDFk time stepping for the transformed unknown V = u - upsilon - t b
// of the diffusion-wave problem
//   d^alpha V - A V = d^p( poly(t) A upsilon, poly(t) A b ) + d^{m-gamma} g,
// with A diagonal (eigenvalues -lambda_j) in the spectral basis.
//
//   scheme     k  m  data derivative p   data polynomials (upsilon, b)
//   ID1-BDF2   2  1  1                   t,       t^2/2
//   ID2-BDF2   2  2  1                   t,       t^2/2
//   ID3-BDF3   3  3  2                   t^2/2,   t^3/6

#include "idmbdf/cq_kernel.hpp"
#include "idmbdf/noise.hpp"
#include "idmbdf/spectral_space.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace idmbdf {

enum class SchemeKind { ID1_BDF2, ID2_BDF2, ID3_BDF3 };

std::string_view scheme_name(SchemeKind kind);
/// Case-insensitive "ID2-BDF2" / "id2-bdf2"; throws std::invalid_argument.
SchemeKind parse_scheme(std::string_view name);

// BDF3 is A(theta)-stable with theta ~ 86.03 deg, so unconditional
// stability for the fractional operator holds only when alpha < pi/(pi - theta).
inline constexpr double kBdf3AlphaLimit = 1.91;

struct SchemeSpec {
  SchemeKind kind = SchemeKind::ID2_BDF2;
  int k = 2;
  int m = 2;
  double alpha = 1.5;
  double gamma = 0.5;
  bool stability_warning = false;

  /// Rejects alpha outside (0,2), alpha == 1, gamma outside (0,1).
  static SchemeSpec make(SchemeKind kind, double alpha, double gamma);

  int data_order() const { return kind == SchemeKind::ID3_BDF3 ? 2 : 1; }
  double noise_order() const { return static_cast<double>(m) - gamma; }
};

struct ProblemSpec {
  ModeField upsilon;
  ModeField b;
  double T = 1.0;
  std::size_t N = 0;

  std::size_t modes() const { return upsilon.modes(); }
  double step() const { return T / static_cast<double>(N); }
  void validate(const SchemeSpec& scheme) const;
};

/// -lambda_j d_tau^p[poly] at t_n for every mode (see table above).
ModeField rhs_initial(const SchemeSpec& scheme, const ProblemSpec& problem, std::size_t n);

/// Weight tables for one (scheme, N); immutable and shareable across
/// trajectories once built.
class Stepper {
 public:
  Stepper(const SchemeSpec& scheme, std::size_t N);

  const SchemeSpec& scheme() const { return scheme_; }
  std::size_t steps() const { return N_; }

  /// V^0..V^N. g may carry fewer modes than the problem (higher modes are
  /// undriven) and must have exactly N steps.
  std::vector<ModeField> step_all(const ProblemSpec& problem, const FoldedNoise& g) const;
  std::vector<ModeField> step_all(const ProblemSpec& problem) const;

  /// V^N only; same arithmetic as step_all.
  ModeField terminal(const ProblemSpec& problem, const FoldedNoise* g) const;

 private:
  void run(const ProblemSpec& problem, const FoldedNoise* g, std::vector<double>& V) const;

  SchemeSpec scheme_;
  std::size_t N_;
  WeightTable w_alpha_;
  WeightTable w_data_;
  WeightTable w_noise_;
};

/// Convenience wrapper building a Stepper for problem.N.
std::vector<ModeField> step_all(const SchemeSpec& scheme, const ProblemSpec& problem, const FoldedNoise& g);

/// u^n = V^n + upsilon + t_n b.
std::vector<ModeField> reconstruct_u(const std::vector<ModeField>& V, const ProblemSpec& problem);

}  // namespace idmbdf
