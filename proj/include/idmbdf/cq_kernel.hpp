#pragma once

// Fractional convolution-quadrature weights generated by powers of the
// BDF1/BDF2/BDF3 symbols.
//
// For a k-step BDF method the (scaled) generating polynomial is
//   tau * delta_tau(xi) = sum_{i=0}^{k} c_i xi^i,
// and the discrete fractional operator of order beta is
//   d_tau^beta phi^n = tau^{-beta} sum_{j=0}^{n} w_j^{(beta)} phi^{n-j},
// with w^{(beta)} the Maclaurin coefficients of (sum c_i xi^i)^beta.
// Tables hold the unscaled w_j; callers apply tau^{-beta}.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace idmbdf {

struct BdfSymbol {
  int k = 0;
  std::vector<double> coeffs;  // ascending powers of xi, size k+1
};

/// Exact coefficient list of tau*delta_tau for k in {1,2,3}.
/// Throws std::invalid_argument for any other order.
BdfSymbol bdf_symbol(int k);

class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(int k, double beta, std::vector<double> w)
      : k_(k), beta_(beta), w_(std::move(w)) {}

  int k() const noexcept { return k_; }
  double beta() const noexcept { return beta_; }
  std::size_t n_max() const noexcept { return w_.empty() ? 0 : w_.size() - 1; }
  std::size_t size() const noexcept { return w_.size(); }

  double operator[](std::size_t j) const { return w_[j]; }
  std::span<const double> weights() const noexcept { return w_; }

 private:
  int k_ = 0;
  double beta_ = 0.0;
  std::vector<double> w_;
};

/// w_0..w_{n_max} of (sum c_i xi^i)^beta. Nonnegative integer powers are
/// expanded by polynomial multiplication; every other beta uses the
/// power-series power recurrence on c_0^beta (1 + p(xi))^beta, O(k n_max).
WeightTable frac_weights(int k, double beta, std::size_t n_max);

/// Truncated Cauchy product of two weight sequences, length min(a, b).
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

/// tau*delta_tau(xi) evaluated at xi = exp(-z tau) through the backward
/// difference form sum_{i=1}^{k} (1 - xi)^i / i, which keeps full relative
/// accuracy when z*tau is small.
std::complex<double> scaled_symbol_at(int k, std::complex<double> z, double tau);

/// |delta_tau^alpha(e^{-z tau}) - z^alpha| with principal branches.
double symbol_error(int k, double alpha, std::complex<double> z, double tau);

}  // namespace idmbdf
