#include "idmbdf/cq_kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace idmbdf {

namespace {

void check_order(int k) {
  if (k < 1 || k > 3) {
    throw std::invalid_argument("BDF order must be 1, 2 or 3 (got " + std::to_string(k) + ")");
  }
}

// exp(w) - 1 without cancellation for small |w|.
std::complex<double> expm1(std::complex<double> w) {
  const double x = w.real();
  const double y = w.imag();
  const double half_sin = std::sin(0.5 * y);
  const double cos_m1 = -2.0 * half_sin * half_sin;
  return {std::expm1(x) * std::cos(y) + cos_m1, std::exp(x) * std::sin(y)};
}

bool is_nonnegative_integer(double beta) {
  return beta >= 0.0 && beta == std::floor(beta) && beta <= 64.0;
}

}  // namespace

BdfSymbol bdf_symbol(int k) {
  check_order(k);
  switch (k) {
    case 1:
      return {1, {1.0, -1.0}};
    case 2:
      return {2, {3.0 / 2.0, -2.0, 1.0 / 2.0}};
    default:
      return {3, {11.0 / 6.0, -3.0, 3.0 / 2.0, -1.0 / 3.0}};
  }
}

WeightTable frac_weights(int k, double beta, std::size_t n_max) {
  const BdfSymbol sym = bdf_symbol(k);
  const std::vector<double>& c = sym.coeffs;
  std::vector<double> w(n_max + 1, 0.0);

  if (is_nonnegative_integer(beta)) {
    w[0] = 1.0;
    const auto power = static_cast<int>(beta);
    std::size_t degree = 0;
    for (int p = 0; p < power; ++p) {
      const std::size_t next = std::min(n_max, degree + static_cast<std::size_t>(k));
      for (std::size_t j = next + 1; j-- > 0;) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= static_cast<std::size_t>(k) && i <= j; ++i) {
          if (j - i <= degree) acc += c[i] * w[j - i];
        }
        w[j] = acc;
      }
      degree = next;
    }
    return {k, beta, std::move(w)};
  }

  // (1 + p(xi))^beta with p_i = c_i / c_0; J.C.P. Miller recurrence
  //   n f_n = sum_{i=1}^{min(n,k)} ((beta + 1) i - n) p_i f_{n-i}.
  std::vector<double> p(c.size());
  for (std::size_t i = 1; i < c.size(); ++i) p[i] = c[i] / c[0];
  const double lead = std::pow(c[0], beta);
  w[0] = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    const std::size_t top = std::min<std::size_t>(n, static_cast<std::size_t>(k));
    for (std::size_t i = 1; i <= top; ++i) {
      acc += ((beta + 1.0) * static_cast<double>(i) - static_cast<double>(n)) * p[i] * w[n - i];
    }
    w[n] = acc / static_cast<double>(n);
  }
  for (double& v : w) v *= lead;
  return {k, beta, std::move(w)};
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= j; ++i) acc += a[i] * b[j - i];
    out[j] = acc;
  }
  return out;
}

std::complex<double> scaled_symbol_at(int k, std::complex<double> z, double tau) {
  check_order(k);
  const std::complex<double> u = -expm1(-z * tau);  // 1 - xi
  std::complex<double> sum = 0.0;
  std::complex<double> power = 1.0;
  for (int i = 1; i <= k; ++i) {
    power *= u;
    sum += power / static_cast<double>(i);
  }
  return sum;
}

double symbol_error(int k, double alpha, std::complex<double> z, double tau) {
  const std::complex<double> delta = scaled_symbol_at(k, z, tau) / tau;
  auto principal_pow = [alpha](std::complex<double> v) -> std::complex<double> {
    if (v == std::complex<double>(0.0)) return 0.0;
    return std::exp(alpha * std::log(v));
  };
  return std::abs(principal_pow(delta) - principal_pow(z));
}

}  // namespace idmbdf
