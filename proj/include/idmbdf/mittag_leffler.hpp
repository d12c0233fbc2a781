#pragma once

// Two-parameter Mittag-Leffler function E_{a,b}(z) = sum_k z^k / Gamma(a k + b)
// for real a in (0,2], b > 0 and real z (the solver oracle needs z <= 0).

namespace idmbdf {

struct MlQuery {
  double a = 1.0;
  double b = 1.0;
  double z = 0.0;
  double tol = 1e-12;  // absolute
};

enum class MlBranch { Series, Integral };

struct MlValue {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  MlBranch branch = MlBranch::Series;
  bool tol_met = true;
};

struct MlOptions {
  // Beyond this |z| negative arguments go to the integral representation.
  // Below it the series is used whenever its rounding estimate meets tol.
  double series_limit = 20.0;
};

/// Throws std::invalid_argument for a outside (0,2], b <= 0 or tol <= 0.
MlValue ml(const MlQuery& q, const MlOptions& opts = {});

/// Power series with term-ratio stopping. Exposed for the crossover tests.
MlValue ml_series(double a, double b, double z);

/// Hankel-contour representation for z < 0: a small circle around the
/// origin, the two rays along the negative axis and, for a > 1, the residues
/// at z^{1/a} exp(+-i pi / a). a == 1 uses a bounded real integral instead.
MlValue ml_integral(double a, double b, double z);

inline double mittag_leffler(double a, double b, double z) { return ml({a, b, z}).value; }

}  // namespace idmbdf
