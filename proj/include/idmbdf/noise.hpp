#pragma once

// Truncated trace-class noise dW_l/dt = sum_{j<=l} sigma_j dbeta_j/dt phi_j
// sampled on a fine reference grid, and its m-fold time integrals
//   g_l = t^{m-1}/Gamma(m) * dW_l/dt
// restricted to coarse nodes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace idmbdf {

struct NoiseSpec {
  int l = 100;                  // truncation level
  double sigma_exponent = 2.0;  // sigma_j = j^{-sigma_exponent}
  std::size_t fine_steps = std::size_t{1} << 14;
  double T = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;

  double sigma(int j) const;
  double fine_step() const { return T / static_cast<double>(fine_steps); }

  /// sum_{l < j <= 2l} sigma_j^2, the convergence check used by validate().
  double tail_mass() const;

  /// Throws std::invalid_argument on a non-positive l or T, a fine grid that
  /// is not a power of two, or a sigma rule whose squared partial sums have
  /// not settled to 1e-6 by j = l.
  void validate() const;
};

/// l x fine_steps Brownian increments, row j-1 for mode j, each N(0, tau_bar).
/// sigma_j is applied when folding, not here.
struct NoisePathSet {
  int l = 0;
  std::size_t fine_steps = 0;
  double tau_bar = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  std::vector<double> sigma;       // per mode
  std::vector<double> increments;  // row-major

  std::span<const double> row(int j) const {
    return std::span<const double>(increments).subspan(static_cast<std::size_t>(j - 1) * fine_steps, fine_steps);
  }
};

/// Coarse-node values g_j(t_n), n = 0..steps, stored node-major: value(n, j).
struct FoldedNoise {
  std::size_t modes = 0;
  std::size_t steps = 0;
  std::vector<double> data;

  FoldedNoise() = default;
  FoldedNoise(std::size_t modes_, std::size_t steps_)
      : modes(modes_), steps(steps_), data((steps_ + 1) * modes_, 0.0) {}

  double& at(std::size_t n, std::size_t mode) { return data[n * modes + mode]; }
  double at(std::size_t n, std::size_t mode) const { return data[n * modes + mode]; }
  std::span<const double> node(std::size_t n) const {
    return std::span<const double>(data).subspan(n * modes, modes);
  }
};

/// Increments of mode j (1-based) for spec.trajectory; independent of l.
std::vector<double> sample_mode_increments(const NoiseSpec& spec, int j);

NoisePathSet sample_paths(const NoiseSpec& spec);

/// sigma * (t^{m-1}/Gamma(m) * dbeta/dt) on the fine grid, fine_steps + 1
/// values. m = 1 returns the partial sums W(t_k). For m >= 2, W is integrated
/// m-1 times by the BDF-k recursion sum_i c_i y_{n-i} = tau_bar x_n with zero
/// history, which reproduces tau_bar^{m-1} sum_i w_i^{(1-m)} W_{n-i} exactly
/// in exact arithmetic at O(k) cost per node.
std::vector<double> fold_fine(std::span<const double> increments, double sigma, int m, int k, double tau_bar);

/// Same quantity through the explicit weight table frac_weights(k, 1-m, .);
/// O(fine_steps^2). Used to cross-check fold_fine.
std::vector<double> fold_fine_by_weights(std::span<const double> increments, double sigma, int m, int k,
                                         double tau_bar);

/// Every (fine_size-1)/coarse_N-th entry of a fine-grid array.
std::vector<double> restrict_to_coarse(std::span<const double> fine, std::size_t coarse_N);

/// Folds every mode and restricts to coarse_N steps. Throws if coarse_N does
/// not divide fine_steps or m is not 1, 2 or 3.
FoldedNoise fold_noise(const NoisePathSet& paths, int m, int k, std::size_t coarse_N);

/// Debug replay file: magic, l, fine_steps, seed as little-endian uint64,
/// then l * fine_steps little-endian binary64 increments, row-major.
inline constexpr std::uint64_t kNoiseDumpMagic = 0x53494F4E424D4449ull;  // "IDMBNOIS"

void write_noise_dump(const NoisePathSet& paths, const std::filesystem::path& file);
/// The header carries no sigma rule or horizon; the caller supplies them.
NoisePathSet read_noise_dump(const std::filesystem::path& file, double sigma_exponent = 2.0, double T = 1.0);

}  // namespace idmbdf
