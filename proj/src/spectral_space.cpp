#include "idmbdf/spectral_space.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace idmbdf {

namespace {

void check_same_size(const ModeField& a, const ModeField& b) {
  if (a.modes() != b.modes()) throw std::invalid_argument("mode count mismatch");
}

}  // namespace

ModeField& ModeField::operator+=(const ModeField& other) {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

ModeField& ModeField::operator-=(const ModeField& other) {
  check_same_size(*this, other);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

ModeField& ModeField::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

ModeField operator+(ModeField a, const ModeField& b) { return a += b; }
ModeField operator-(ModeField a, const ModeField& b) { return a -= b; }
ModeField operator*(double s, ModeField a) { return a *= s; }

double eigenvalue(int j) {
  if (j < 1) throw std::invalid_argument("eigenvalue index must be >= 1 (got " + std::to_string(j) + ")");
  const double w = static_cast<double>(j) * std::numbers::pi;
  return w * w;
}

double basis_function(int j, double x) {
  return std::numbers::sqrt2 * std::sin(static_cast<double>(j) * std::numbers::pi * x);
}

ModeField project(const std::function<double(double)>& f, std::size_t modes,
                  ProjectionOptions opts) {
  const std::size_t points = opts.panels * kGaussNodesPerPanel;
  if (opts.panels == 0 || points < 4 * modes) {
    throw std::invalid_argument("projection needs at least 4 quadrature points per mode (have " +
                                std::to_string(points) + " for " + std::to_string(modes) + " modes)");
  }
  using rule = boost::math::quadrature::gauss<double, kGaussNodesPerPanel>;
  // Boost stores the nonnegative half of the symmetric rule.
  const auto& half_nodes = rule::abscissa();
  const auto& half_weights = rule::weights();

  std::vector<double> nodes;
  std::vector<double> weights;
  nodes.reserve(kGaussNodesPerPanel);
  weights.reserve(kGaussNodesPerPanel);
  for (std::size_t i = 0; i < half_nodes.size(); ++i) {
    if (half_nodes[i] == 0.0) {
      nodes.push_back(0.0);
      weights.push_back(half_weights[i]);
      continue;
    }
    nodes.push_back(half_nodes[i]);
    weights.push_back(half_weights[i]);
    nodes.push_back(-half_nodes[i]);
    weights.push_back(half_weights[i]);
  }

  ModeField out(modes);
  const double h = 1.0 / static_cast<double>(opts.panels);
  for (std::size_t p = 0; p < opts.panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double x = mid + 0.5 * h * nodes[q];
      const double fw = f(x) * 0.5 * h * weights[q] * std::numbers::sqrt2;
      if (fw == 0.0) continue;
      // sin(j theta) by the Chebyshev recurrence
      const double theta = std::numbers::pi * x;
      const double two_cos = 2.0 * std::cos(theta);
      double s_prev = 0.0;
      double s_cur = std::sin(theta);
      for (std::size_t j = 0; j < modes; ++j) {
        out[j] += fw * s_cur;
        const double s_next = two_cos * s_cur - s_prev;
        s_prev = s_cur;
        s_cur = s_next;
      }
    }
  }
  return out;
}

double evaluate(const ModeField& u, double x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < u.modes(); ++j) acc += u[j] * basis_function(static_cast<int>(j + 1), x);
  return acc;
}

double l2_norm(const ModeField& u) {
  double acc = 0.0;
  for (double v : u.coeffs()) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace idmbdf
