#include "idmbdf/stepper.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace idmbdf {

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ID1_BDF2:
      return "ID1-BDF2";
    case SchemeKind::ID2_BDF2:
      return "ID2-BDF2";
    case SchemeKind::ID3_BDF3:
      return "ID3-BDF3";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (SchemeKind kind : {SchemeKind::ID1_BDF2, SchemeKind::ID2_BDF2, SchemeKind::ID3_BDF3}) {
    if (upper == scheme_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected id1-bdf2, id2-bdf2 or id3-bdf3)");
}

SchemeSpec SchemeSpec::make(SchemeKind kind, double alpha, double gamma) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) {
    throw std::invalid_argument("alpha must lie in (0,1) or (1,2) (got " + std::to_string(alpha) + ")");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0,1) (got " + std::to_string(gamma) + ")");
  }
  SchemeSpec s;
  s.kind = kind;
  s.alpha = alpha;
  s.gamma = gamma;
  switch (kind) {
    case SchemeKind::ID1_BDF2:
      s.k = 2;
      s.m = 1;
      break;
    case SchemeKind::ID2_BDF2:
      s.k = 2;
      s.m = 2;
      break;
    case SchemeKind::ID3_BDF3:
      s.k = 3;
      s.m = 3;
      s.stability_warning = alpha >= kBdf3AlphaLimit;
      break;
  }
  return s;
}

void ProblemSpec::validate(const SchemeSpec& scheme) const {
  if (upsilon.modes() != b.modes()) throw std::invalid_argument("upsilon and b must have the same mode count");
  if (upsilon.modes() == 0) throw std::invalid_argument("problem has no modes");
  if (N < static_cast<std::size_t>(scheme.k)) {
    throw std::invalid_argument("N must be at least the BDF order (got " + std::to_string(N) + ")");
  }
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
}

namespace {

struct DataPolynomials {
  double upsilon;
  double b;
};

// Polynomials multiplying A upsilon and A b before the discrete derivative.
DataPolynomials data_polynomials(int data_order, double t) {
  if (data_order == 1) return {t, 0.5 * t * t};
  return {0.5 * t * t, t * t * t / 6.0};
}

// d_tau^p applied to the data polynomials at t_n.
DataPolynomials discrete_data_derivative(const SchemeSpec& scheme, const WeightTable& w, double tau,
                                         std::size_t n) {
  double up = 0.0;
  double bp = 0.0;
  for (std::size_t i = 0; i <= n && i < w.size(); ++i) {
    const auto q = data_polynomials(scheme.data_order(), static_cast<double>(n - i) * tau);
    up += w[i] * q.upsilon;
    bp += w[i] * q.b;
  }
  const double scale = std::pow(tau, -scheme.data_order());
  return {scale * up, scale * bp};
}

}  // namespace

ModeField rhs_initial(const SchemeSpec& scheme, const ProblemSpec& problem, std::size_t n) {
  problem.validate(scheme);
  if (n < 1 || n > problem.N) throw std::invalid_argument("rhs_initial: n must lie in [1, N]");
  const WeightTable w = frac_weights(scheme.k, scheme.data_order(), n);
  const auto d = discrete_data_derivative(scheme, w, problem.step(), n);
  ModeField out(problem.modes());
  for (std::size_t j = 0; j < out.modes(); ++j) {
    const double lambda = eigenvalue(static_cast<int>(j + 1));
    out[j] = -lambda * (problem.upsilon[j] * d.upsilon + problem.b[j] * d.b);
  }
  return out;
}

Stepper::Stepper(const SchemeSpec& scheme, std::size_t N)
    : scheme_(scheme),
      N_(N),
      w_alpha_(frac_weights(scheme.k, scheme.alpha, N)),
      w_data_(frac_weights(scheme.k, scheme.data_order(), N)),
      w_noise_(frac_weights(scheme.k, scheme.noise_order(), N)) {}

void Stepper::run(const ProblemSpec& problem, const FoldedNoise* g, std::vector<double>& V) const {
  problem.validate(scheme_);
  if (problem.N != N_) throw std::invalid_argument("problem N does not match the stepper");
  const std::size_t J = problem.modes();
  const std::size_t N = N_;
  const double tau = problem.step();
  const double scale_alpha = std::pow(tau, -scheme_.alpha);
  const double scale_noise = std::pow(tau, -scheme_.noise_order());

  std::size_t noisy = 0;
  if (g != nullptr) {
    if (g->steps != N) throw std::invalid_argument("folded noise step count does not match N");
    if (g->modes > J) throw std::invalid_argument("folded noise has more modes than the problem");
    noisy = g->modes;
  }

  // Noise forcing F[n][j] = tau^{-(m-gamma)} sum_{i=0}^{n} w_i g[n-i][j]; i
  // runs outermost so each F[n][j] still accumulates in ascending i.
  std::vector<double> forcing((N + 1) * J, 0.0);
  if (noisy > 0) {
    for (std::size_t i = 0; i <= N; ++i) {
      const double wi = w_noise_[i];
      for (std::size_t n = i; n <= N; ++n) {
        const double* src = &g->data[(n - i) * noisy];
        double* dst = &forcing[n * J];
        for (std::size_t j = 0; j < noisy; ++j) dst[j] += wi * src[j];
      }
    }
  }

  std::vector<double> lambda(J);
  std::vector<double> diag(J);
  for (std::size_t j = 0; j < J; ++j) {
    lambda[j] = eigenvalue(static_cast<int>(j + 1));
    diag[j] = scale_alpha * w_alpha_[0] + lambda[j];
    if (!(diag[j] > 0.0)) throw std::logic_error("non-positive diagonal in the per-mode update");
  }

  V.assign((N + 1) * J, 0.0);
  std::vector<double> history(J);
  for (std::size_t n = 1; n <= N; ++n) {
    std::fill(history.begin(), history.end(), 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
      const double wi = w_alpha_[i];
      const double* past = &V[(n - i) * J];
      for (std::size_t j = 0; j < J; ++j) history[j] += wi * past[j];
    }
    const auto d = discrete_data_derivative(scheme_, w_data_, tau, n);
    double* cur = &V[n * J];
    const double* f = &forcing[n * J];
    for (std::size_t j = 0; j < J; ++j) {
      const double data = -lambda[j] * (problem.upsilon[j] * d.upsilon + problem.b[j] * d.b);
      cur[j] = (-scale_alpha * history[j] + data + scale_noise * f[j]) / diag[j];
    }
  }
}

namespace {

std::vector<ModeField> split_nodes(const std::vector<double>& V, std::size_t J) {
  std::vector<ModeField> out;
  out.reserve(V.size() / J);
  for (auto it = V.begin(); it != V.end(); it += static_cast<std::ptrdiff_t>(J)) {
    out.emplace_back(std::vector<double>(it, it + static_cast<std::ptrdiff_t>(J)));
  }
  return out;
}

}  // namespace

std::vector<ModeField> Stepper::step_all(const ProblemSpec& problem, const FoldedNoise& g) const {
  std::vector<double> V;
  run(problem, &g, V);
  return split_nodes(V, problem.modes());
}

std::vector<ModeField> Stepper::step_all(const ProblemSpec& problem) const {
  std::vector<double> V;
  run(problem, nullptr, V);
  return split_nodes(V, problem.modes());
}

ModeField Stepper::terminal(const ProblemSpec& problem, const FoldedNoise* g) const {
  std::vector<double> V;
  run(problem, g, V);
  const std::size_t J = problem.modes();
  return ModeField(std::vector<double>(V.end() - static_cast<std::ptrdiff_t>(J), V.end()));
}

std::vector<ModeField> step_all(const SchemeSpec& scheme, const ProblemSpec& problem, const FoldedNoise& g) {
  return Stepper(scheme, problem.N).step_all(problem, g);
}

std::vector<ModeField> reconstruct_u(const std::vector<ModeField>& V, const ProblemSpec& problem) {
  std::vector<ModeField> u;
  u.reserve(V.size());
  const double tau = problem.step();
  for (std::size_t n = 0; n < V.size(); ++n) {
    ModeField un = V[n];
    const double t = static_cast<double>(n) * tau;
    for (std::size_t j = 0; j < un.modes(); ++j) un[j] += problem.upsilon[j] + t * problem.b[j];
    u.push_back(std::move(un));
  }
  return u;
}

}  // namespace idmbdf
