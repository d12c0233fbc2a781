#pragma once

// Functions on (0,1) in the orthonormal Dirichlet eigenbasis
//   phi_j(x) = sqrt(2) sin(j pi x),  -Laplacian phi_j = (j pi)^2 phi_j.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace idmbdf {

/// Coefficient vector; c[j-1] multiplies phi_j.
class ModeField {
 public:
  ModeField() = default;
  explicit ModeField(std::size_t modes) : c_(modes, 0.0) {}
  explicit ModeField(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  std::size_t modes() const noexcept { return c_.size(); }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  std::span<const double> coeffs() const noexcept { return c_; }
  std::span<double> coeffs() noexcept { return c_; }

  ModeField& operator+=(const ModeField& other);
  ModeField& operator-=(const ModeField& other);
  ModeField& operator*=(double s);

 private:
  std::vector<double> c_;
};

ModeField operator+(ModeField a, const ModeField& b);
ModeField operator-(ModeField a, const ModeField& b);
ModeField operator*(double s, ModeField a);

/// (j pi)^2 for j >= 1.
double eigenvalue(int j);

double basis_function(int j, double x);

struct ProjectionOptions {
  // Composite Gauss-Legendre: panels x 8 nodes. The default resolves the
  // sqrt(1 - x) endpoint behaviour of the reference data to ~1e-10.
  std::size_t panels = 2048;
};

inline constexpr std::size_t kGaussNodesPerPanel = 8;

/// c_j = int_0^1 f(x) phi_j(x) dx for j = 1..modes. Requires
/// panels * 8 >= 4 * modes.
ModeField project(const std::function<double(double)>& f, std::size_t modes,
                  ProjectionOptions opts = {});

/// sum_j c_j phi_j(x).
double evaluate(const ModeField& u, double x);

/// Parseval: sqrt(sum c_j^2).
double l2_norm(const ModeField& u);

}  // namespace idmbdf
