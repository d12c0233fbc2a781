#include "idmbdf/noise.hpp"
#include "idmbdf/philox.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

using namespace idmbdf;

namespace {

NoiseSpec small_spec(std::size_t fine_steps, std::uint64_t seed = 7, std::uint64_t trajectory = 0) {
  NoiseSpec s;
  s.l = 100;
  s.fine_steps = fine_steps;
  s.seed = seed;
  s.trajectory = trajectory;
  return s;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal streams are pure functions of their coordinates") {
  const NormalStream a(42, 3, 17);
  const NormalStream b(42, 3, 17);
  for (std::uint32_t i : {0u, 1u, 1000u}) CHECK(a.pair(i) == b.pair(i));
  CHECK(NormalStream(42, 3, 18).pair(0) != a.pair(0));
  CHECK(NormalStream(42, 4, 17).pair(0) != a.pair(0));
  CHECK(NormalStream(43, 3, 17).pair(0) != a.pair(0));
  CHECK(NormalStream(42, 3, 17 + (std::uint64_t{1} << 32)).pair(0) != a.pair(0));
}

TEST_CASE("fine increments have the Brownian moments") {
  const auto spec = small_spec(std::size_t{1} << 14, 11);
  const double tau_bar = spec.fine_step();
  std::vector<std::vector<double>> rows;
  for (int j = 1; j <= 4; ++j) rows.push_back(sample_mode_increments(spec, j));
  const auto n = static_cast<double>(spec.fine_steps);
  for (const auto& r : rows) {
    CHECK(std::abs(mean(r)) < 5.0 * std::sqrt(tau_bar / n));
    CHECK(covariance(r, r) == doctest::Approx(tau_bar).epsilon(0.05));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = i + 1; k < rows.size(); ++k) {
      const double corr = covariance(rows[i], rows[k]) / tau_bar;
      CHECK_MESSAGE(std::abs(corr) < 5.0 / std::sqrt(n), "modes " << i + 1 << "," << k + 1);
    }
  }
  // Lag-one autocorrelation within a row.
  const std::vector<double> head(rows[0].begin(), rows[0].end() - 1);
  const std::vector<double> tail(rows[0].begin() + 1, rows[0].end());
  CHECK(std::abs(covariance(head, tail) / tau_bar) < 5.0 / std::sqrt(n));
}

TEST_CASE("sampling is deterministic and nested in l") {
  auto spec = small_spec(1024, 5, 3);
  const auto p1 = sample_paths(spec);
  const auto p2 = sample_paths(spec);
  CHECK(p1.increments == p2.increments);
  spec.l = 150;
  const auto wide = sample_paths(spec);
  for (int j = 1; j <= 100; ++j) {
    const auto a = p1.row(j);
    const auto b = wide.row(j);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
  CHECK(p1.sigma[0] == 1.0);
  CHECK(p1.sigma[9] == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("noise spec validation") {
  NoiseSpec s = small_spec(1024);
  CHECK_NOTHROW(s.validate());
  s.fine_steps = 1000;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.fine_steps = 1024;
  s.l = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.l = 10;  // sigma_j^2 tail over (10, 20] is far above 1e-6
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.l = 100;
  s.T = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.T = 1.0;
  s.sigma_exponent = 0.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("folding a zero path gives zero") {
  const std::vector<double> zero(256, 0.0);
  for (int m = 1; m <= 3; ++m) {
    for (int k = 1; k <= 3; ++k) {
      for (double v : fold_fine(zero, 1.0, m, k, 1.0 / 256)) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("folding the identity path integrates polynomials") {
  // W(t) = t: one fold gives t^2/2, two give t^3/6.
  const std::size_t n = 1024;
  const double tau_bar = 1.0 / static_cast<double>(n);
  const std::vector<double> incr(n, tau_bar);
  for (int k = 1; k <= 3; ++k) {
    CHECK(fold_fine(incr, 1.0, 1, k, tau_bar).back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fold_fine(incr, 1.0, 2, k, tau_bar).back() - 0.5) < 10.0 * tau_bar);
    CHECK(std::abs(fold_fine(incr, 1.0, 3, k, tau_bar).back() - 1.0 / 6.0) < 10.0 * tau_bar);
  }
  CHECK(fold_fine(incr, 2.5, 2, 2, tau_bar).back() ==
        doctest::Approx(2.5 * fold_fine(incr, 1.0, 2, 2, tau_bar).back()).epsilon(1e-14));
}

TEST_CASE("eight-step fold matches a hand-rolled weighted sum") {
  const std::vector<double> incr{0.3, -0.1, 0.25, 0.0, -0.4, 0.2, 0.15, -0.05};
  const double tau_bar = 0.125;
  // BDF1, m = 2: y_n = y_{n-1} + tau_bar W_n, a right-endpoint Riemann sum.
  std::vector<double> W(9, 0.0);
  for (std::size_t i = 0; i < 8; ++i) W[i + 1] = W[i] + incr[i];
  double riemann = 0.0;
  for (std::size_t i = 1; i <= 8; ++i) riemann += tau_bar * W[i];
  CHECK(fold_fine(incr, 1.0, 2, 1, tau_bar).back() == doctest::Approx(riemann).epsilon(1e-14));
  // BDF1, m = 3: (1 - xi)^{-2} has weights i + 1.
  double second = 0.0;
  for (std::size_t i = 1; i <= 8; ++i) second += tau_bar * tau_bar * static_cast<double>(8 - i + 1) * W[i];
  CHECK(fold_fine(incr, 1.0, 3, 1, tau_bar).back() == doctest::Approx(second).epsilon(1e-14));
}

TEST_CASE("fold recursion agrees with the explicit weight convolution") {
  const auto spec = small_spec(2048, 9);
  const auto incr = sample_mode_increments(spec, 2);
  for (int m = 1; m <= 3; ++m) {
    for (int k = 1; k <= 3; ++k) {
      const auto a = fold_fine(incr, 0.25, m, k, spec.fine_step());
      const auto b = fold_fine_by_weights(incr, 0.25, m, k, spec.fine_step());
      REQUIRE(a.size() == b.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
      CHECK_MESSAGE(worst < 1e-13, "m=" << m << " k=" << k << " worst=" << worst);
    }
  }
}

TEST_CASE("fold approximates the stochastic integral") {
  // g(T) = int_0^T (T - s) dbeta(s) for m = 2; midpoint Ito sum as reference.
  const auto spec = small_spec(std::size_t{1} << 12, 21);
  const auto incr = sample_mode_increments(spec, 1);
  const double tau_bar = spec.fine_step();
  double ito = 0.0;
  for (std::size_t i = 0; i < incr.size(); ++i) ito += (1.0 - (static_cast<double>(i) + 0.5) * tau_bar) * incr[i];
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(fold_fine(incr, 1.0, 2, k, tau_bar).back() - ito) < 20.0 * tau_bar);
}

TEST_CASE("fold is linear in the increments") {
  const auto spec = small_spec(512, 3);
  const auto x = sample_mode_increments(spec, 1);
  const auto y = sample_mode_increments(spec, 2);
  std::vector<double> combo(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) combo[i] = 2.0 * x[i] - 0.5 * y[i];
  const auto fx = fold_fine(x, 1.0, 3, 3, spec.fine_step());
  const auto fy = fold_fine(y, 1.0, 3, 3, spec.fine_step());
  const auto fc = fold_fine(combo, 1.0, 3, 3, spec.fine_step());
  for (std::size_t i = 0; i < fc.size(); ++i) CHECK(std::abs(fc[i] - (2.0 * fx[i] - 0.5 * fy[i])) < 1e-14);
}

TEST_CASE("coarse restrictions of one fine path are nested") {
  const auto paths = sample_paths(small_spec(std::size_t{1} << 11, 13));
  const auto g128 = fold_noise(paths, 2, 2, 128);
  const auto g256 = fold_noise(paths, 2, 2, 256);
  const auto g512 = fold_noise(paths, 2, 2, 512);
  for (std::size_t n = 0; n <= 128; ++n) {
    for (std::size_t j = 0; j < 100; j += 9) {
      CHECK(g128.at(n, j) == g256.at(2 * n, j));
      CHECK(g256.at(2 * n, j) == g512.at(4 * n, j));
    }
  }
  const auto fine = fold_fine(paths.row(4), paths.sigma[3], 2, 2, paths.tau_bar);
  CHECK(g512.at(512, 3) == fine.back());
  CHECK(g512.at(0, 3) == 0.0);
  CHECK_THROWS_AS(fold_noise(paths, 2, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(fold_noise(paths, 4, 2, 128), std::invalid_argument);
  CHECK_THROWS_AS(fold_noise(paths, 0, 2, 128), std::invalid_argument);
}

TEST_CASE("folded noise has the variance of the integrated Brownian motion") {
  // Var g(t) = sigma^2 t for m = 1, t^3/3 for m = 2, t^5/20 for m = 3.
  const std::size_t trajectories = 10000;
  const double sigma = 0.5;
  NoiseSpec spec = small_spec(512, 99);
  const double expected[] = {sigma * sigma, sigma * sigma / 3.0, sigma * sigma / 20.0};
  for (int m = 1; m <= 3; ++m) {
    std::vector<double> samples;
    samples.reserve(trajectories);
    for (std::size_t t = 0; t < trajectories; ++t) {
      spec.trajectory = t;
      samples.push_back(fold_fine(sample_mode_increments(spec, 1), sigma, m, 2, spec.fine_step()).back());
    }
    CHECK(std::abs(mean(samples)) < 5.0 * std::sqrt(expected[m - 1] / static_cast<double>(trajectories)));
    CHECK_MESSAGE(covariance(samples, samples) == doctest::Approx(expected[m - 1]).epsilon(0.05), "m=" << m);
  }
}

TEST_CASE("noise dump round trip") {
  const auto paths = sample_paths(small_spec(256, 0xdeadbeefcafeull, 4));
  const auto file = std::filesystem::temp_directory_path() / "idmbdf_noise_roundtrip.bin";
  write_noise_dump(paths, file);
  CHECK(std::filesystem::file_size(file) == 32 + 8 * paths.increments.size());
  {
    std::ifstream is(file, std::ios::binary);
    unsigned char first[8];
    is.read(reinterpret_cast<char*>(first), 8);
    CHECK(std::string(reinterpret_cast<char*>(first), 8) == "IDMBNOIS");
  }
  const auto back = read_noise_dump(file);
  CHECK(back.l == paths.l);
  CHECK(back.fine_steps == paths.fine_steps);
  CHECK(back.seed == paths.seed);
  CHECK(back.tau_bar == paths.tau_bar);
  CHECK(back.sigma == paths.sigma);
  CHECK(back.increments == paths.increments);

  std::ofstream(file, std::ios::binary | std::ios::trunc) << "not a dump";
  CHECK_THROWS_AS(read_noise_dump(file), std::runtime_error);
  std::filesystem::remove(file);
}
