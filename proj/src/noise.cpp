#include "idmbdf/noise.hpp"

#include "idmbdf/cq_kernel.hpp"
#include "idmbdf/philox.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace idmbdf {

double NoiseSpec::sigma(int j) const { return std::pow(static_cast<double>(j), -sigma_exponent); }

double NoiseSpec::tail_mass() const {
  double tail = 0.0;
  for (int j = 2 * l; j > l; --j) tail += sigma(j) * sigma(j);
  return tail;
}

void NoiseSpec::validate() const {
  if (l < 1) throw std::invalid_argument("noise truncation level l must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("final time T must be positive");
  if (fine_steps == 0 || !std::has_single_bit(fine_steps)) {
    throw std::invalid_argument("fine_steps must be a power of two (got " + std::to_string(fine_steps) + ")");
  }
  if (fine_steps > (std::size_t{1} << 31)) throw std::invalid_argument("fine_steps exceeds 2^31");
  if (!(tail_mass() <= 1e-6)) {
    throw std::invalid_argument("sigma_j^2 partial sums have not converged to 1e-6 by j = l (tail " +
                                std::to_string(tail_mass()) + ")");
  }
}

std::vector<double> sample_mode_increments(const NoiseSpec& spec, int j) {
  const NormalStream stream(spec.seed, static_cast<std::uint32_t>(j), spec.trajectory);
  const double scale = std::sqrt(spec.fine_step());
  std::vector<double> out(spec.fine_steps);
  const std::size_t pairs = spec.fine_steps / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto [a, b] = stream.pair(static_cast<std::uint32_t>(p));
    out[2 * p] = scale * a;
    out[2 * p + 1] = scale * b;
  }
  if (spec.fine_steps % 2 == 1) out.back() = scale * stream.pair(static_cast<std::uint32_t>(pairs)).first;
  return out;
}

NoisePathSet sample_paths(const NoiseSpec& spec) {
  spec.validate();
  NoisePathSet set;
  set.l = spec.l;
  set.fine_steps = spec.fine_steps;
  set.tau_bar = spec.fine_step();
  set.seed = spec.seed;
  set.trajectory = spec.trajectory;
  set.sigma.resize(static_cast<std::size_t>(spec.l));
  set.increments.reserve(static_cast<std::size_t>(spec.l) * spec.fine_steps);
  for (int j = 1; j <= spec.l; ++j) {
    set.sigma[static_cast<std::size_t>(j - 1)] = spec.sigma(j);
    const auto row = sample_mode_increments(spec, j);
    set.increments.insert(set.increments.end(), row.begin(), row.end());
  }
  return set;
}

namespace {

void check_fold_order(int m) {
  if (m < 1 || m > 3) throw std::invalid_argument("fold count m must be 1, 2 or 3 (got " + std::to_string(m) + ")");
}

std::vector<double> brownian_values(std::span<const double> increments, double sigma) {
  std::vector<double> w(increments.size() + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    acc += increments[i];
    w[i + 1] = sigma * acc;
  }
  return w;
}

}  // namespace

std::vector<double> fold_fine(std::span<const double> increments, double sigma, int m, int k, double tau_bar) {
  check_fold_order(m);
  const BdfSymbol sym = bdf_symbol(k);
  std::vector<double> y = brownian_values(increments, sigma);
  std::vector<double> next(y.size());
  const double inv_lead = 1.0 / sym.coeffs[0];
  for (int pass = 1; pass < m; ++pass) {
    for (std::size_t n = 0; n < y.size(); ++n) {
      double rhs = tau_bar * y[n];
      for (std::size_t i = 1; i < sym.coeffs.size() && i <= n; ++i) rhs -= sym.coeffs[i] * next[n - i];
      next[n] = rhs * inv_lead;
    }
    y.swap(next);
  }
  return y;
}

std::vector<double> fold_fine_by_weights(std::span<const double> increments, double sigma, int m, int k,
                                         double tau_bar) {
  check_fold_order(m);
  const std::vector<double> w = brownian_values(increments, sigma);
  if (m == 1) return w;
  const WeightTable weights = frac_weights(k, static_cast<double>(1 - m), w.size() - 1);
  const double scale = std::pow(tau_bar, m - 1);
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t n = 0; n < w.size(); ++n) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= n; ++i) acc += weights[n - i] * w[i];
    g[n] = scale * acc;
  }
  return g;
}

std::vector<double> restrict_to_coarse(std::span<const double> fine, std::size_t coarse_N) {
  if (fine.empty() || coarse_N == 0) throw std::invalid_argument("empty grid");
  const std::size_t fine_N = fine.size() - 1;
  if (fine_N % coarse_N != 0) {
    throw std::invalid_argument("coarse step count " + std::to_string(coarse_N) +
                                " does not divide fine step count " + std::to_string(fine_N));
  }
  const std::size_t stride = fine_N / coarse_N;
  std::vector<double> out(coarse_N + 1);
  for (std::size_t n = 0; n <= coarse_N; ++n) out[n] = fine[n * stride];
  return out;
}

FoldedNoise fold_noise(const NoisePathSet& paths, int m, int k, std::size_t coarse_N) {
  check_fold_order(m);
  if (coarse_N == 0 || paths.fine_steps % coarse_N != 0) {
    throw std::invalid_argument("coarse step count " + std::to_string(coarse_N) +
                                " does not divide fine step count " + std::to_string(paths.fine_steps));
  }
  FoldedNoise out(static_cast<std::size_t>(paths.l), coarse_N);
  for (int j = 1; j <= paths.l; ++j) {
    const double sigma = paths.sigma.empty() ? 1.0 : paths.sigma[static_cast<std::size_t>(j - 1)];
    const auto fine = fold_fine(paths.row(j), sigma, m, k, paths.tau_bar);
    const auto coarse = restrict_to_coarse(fine, coarse_N);
    for (std::size_t n = 0; n <= coarse_N; ++n) out.at(n, static_cast<std::size_t>(j - 1)) = coarse[n];
  }
  return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("truncated noise dump");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return v;
}

}  // namespace

void write_noise_dump(const NoisePathSet& paths, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  put_u64(os, kNoiseDumpMagic);
  put_u64(os, static_cast<std::uint64_t>(paths.l));
  put_u64(os, static_cast<std::uint64_t>(paths.fine_steps));
  put_u64(os, paths.seed);
  for (double v : paths.increments) put_u64(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

NoisePathSet read_noise_dump(const std::filesystem::path& file, double sigma_exponent, double T) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  if (get_u64(is) != kNoiseDumpMagic) throw std::runtime_error("not a noise dump: " + file.string());
  NoisePathSet set;
  set.l = static_cast<int>(get_u64(is));
  set.fine_steps = static_cast<std::size_t>(get_u64(is));
  set.seed = get_u64(is);
  set.tau_bar = T / static_cast<double>(set.fine_steps);
  set.increments.resize(static_cast<std::size_t>(set.l) * set.fine_steps);
  for (double& v : set.increments) v = std::bit_cast<double>(get_u64(is));
  set.sigma.resize(static_cast<std::size_t>(set.l));
  for (int j = 1; j <= set.l; ++j) set.sigma[static_cast<std::size_t>(j - 1)] = std::pow(double(j), -sigma_exponent);
  return set;
}

}  // namespace idmbdf
