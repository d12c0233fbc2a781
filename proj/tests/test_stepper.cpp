#include "idmbdf/mittag_leffler.hpp"
#include "idmbdf/stepper.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace idmbdf;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

ProblemSpec single_mode(double upsilon, double b, std::size_t N) {
  return {ModeField(std::vector<double>{upsilon}), ModeField(std::vector<double>{b}), 1.0, N};
}

double terminal_u(const SchemeSpec& s, const ProblemSpec& p) {
  const auto V = Stepper(s, p.N).step_all(p);
  return reconstruct_u(V, p).back()[0];
}

}  // namespace

TEST_CASE("scheme parameters") {
  const auto id1 = SchemeSpec::make(SchemeKind::ID1_BDF2, 1.3, 0.1);
  CHECK(id1.k == 2);
  CHECK(id1.m == 1);
  CHECK(id1.data_order() == 1);
  CHECK(id1.noise_order() == doctest::Approx(0.9));
  const auto id2 = SchemeSpec::make(SchemeKind::ID2_BDF2, 1.7, 0.9);
  CHECK(id2.k == 2);
  CHECK(id2.m == 2);
  CHECK(id2.noise_order() == doctest::Approx(1.1));
  const auto id3 = SchemeSpec::make(SchemeKind::ID3_BDF3, 1.5, 0.5);
  CHECK(id3.k == 3);
  CHECK(id3.m == 3);
  CHECK(id3.data_order() == 2);
  CHECK_FALSE(id3.stability_warning);
  CHECK(SchemeSpec::make(SchemeKind::ID3_BDF3, 1.95, 0.5).stability_warning);
  CHECK_FALSE(SchemeSpec::make(SchemeKind::ID2_BDF2, 1.95, 0.5).stability_warning);

  CHECK(parse_scheme("id2-bdf2") == SchemeKind::ID2_BDF2);
  CHECK(parse_scheme("ID3-BDF3") == SchemeKind::ID3_BDF3);
  CHECK(scheme_name(SchemeKind::ID1_BDF2) == "ID1-BDF2");
  CHECK_THROWS_AS(parse_scheme("bdf2"), std::invalid_argument);

  CHECK_THROWS_AS(SchemeSpec::make(SchemeKind::ID2_BDF2, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SchemeSpec::make(SchemeKind::ID2_BDF2, 2.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SchemeSpec::make(SchemeKind::ID2_BDF2, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SchemeSpec::make(SchemeKind::ID2_BDF2, 1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SchemeSpec::make(SchemeKind::ID2_BDF2, 1.5, 1.0), std::invalid_argument);
}

TEST_CASE("rhs_initial examples") {
  SUBCASE("ID2: BDF2 difference of t") {
    const auto s = SchemeSpec::make(SchemeKind::ID2_BDF2, 1.5, 0.5);
    const auto p = single_mode(1.0, 0.0, 16);
    CHECK(rhs_initial(s, p, 1)[0] == doctest::Approx(-1.5 * kPi2).epsilon(1e-14));
    for (std::size_t n = 2; n <= 16; ++n) CHECK(rhs_initial(s, p, n)[0] == doctest::Approx(-kPi2).epsilon(1e-13));
  }
  SUBCASE("ID2: BDF2 difference of t^2/2") {
    // tau^{-1}(3/2 t_n^2 - 2 t_{n-1}^2 + 1/2 t_{n-2}^2)/2 = t_n for n >= 2
    const auto s = SchemeSpec::make(SchemeKind::ID2_BDF2, 1.5, 0.5);
    const auto p = single_mode(0.0, 1.0, 10);
    for (std::size_t n = 2; n <= 10; ++n) {
      CHECK(rhs_initial(s, p, n)[0] == doctest::Approx(-kPi2 * static_cast<double>(n) * p.step()).epsilon(1e-13));
    }
  }
  SUBCASE("ID3: second BDF3 difference of t^3/6 is t once the stencil is full") {
    const auto s = SchemeSpec::make(SchemeKind::ID3_BDF3, 1.5, 0.5);
    const auto p = single_mode(0.0, 1.0, 20);
    for (std::size_t n = 6; n <= 20; ++n) {
      CHECK(rhs_initial(s, p, n)[0] == doctest::Approx(-kPi2 * static_cast<double>(n) * p.step()).epsilon(1e-11));
    }
  }
  SUBCASE("scales with the eigenvalue and the data") {
    const auto s = SchemeSpec::make(SchemeKind::ID2_BDF2, 1.5, 0.5);
    const ProblemSpec p{ModeField(std::vector<double>{1.0, 2.0, 0.0}), ModeField(3), 1.0, 8};
    const auto r = rhs_initial(s, p, 4);
    CHECK(r[1] == doctest::Approx(2.0 * 4.0 * r[0]).epsilon(1e-14));
    CHECK(r[2] == 0.0);
  }
  SUBCASE("range") {
    const auto s = SchemeSpec::make(SchemeKind::ID2_BDF2, 1.5, 0.5);
    const auto p = single_mode(1.0, 0.0, 8);
    CHECK_THROWS_AS(rhs_initial(s, p, 0), std::invalid_argument);
    CHECK_THROWS_AS(rhs_initial(s, p, 9), std::invalid_argument);
  }
}

TEST_CASE("zero data and zero noise stay at rest") {
  for (SchemeKind kind : {SchemeKind::ID1_BDF2, SchemeKind::ID2_BDF2, SchemeKind::ID3_BDF3}) {
    const auto s = SchemeSpec::make(kind, 1.4, 0.3);
    const ProblemSpec p{ModeField(5), ModeField(5), 1.0, 32};
    for (const auto& v : Stepper(s, 32).step_all(p)) CHECK(l2_norm(v) == 0.0);
    for (const auto& v : Stepper(s, 32).step_all(p, FoldedNoise(5, 32))) CHECK(l2_norm(v) == 0.0);
  }
}

TEST_CASE("reconstruct_u adds back the initial data") {
  const ProblemSpec p{ModeField(std::vector<double>{1.0, -2.0}), ModeField(std::vector<double>{0.5, 4.0}), 2.0, 4};
  const std::vector<ModeField> V(5, ModeField(std::vector<double>{0.1, 0.2}));
  const auto u = reconstruct_u(V, p);
  REQUIRE(u.size() == 5);
  CHECK(u[0][0] == doctest::Approx(1.1));
  CHECK(u[4][1] == doctest::Approx(0.2 - 2.0 + 2.0 * 4.0));
  CHECK(u[2][0] == doctest::Approx(0.1 + 1.0 + 1.0 * 0.5));
}

TEST_CASE("deterministic single mode converges to the Mittag-Leffler solution") {
  const double alpha = 1.5;
  const double z = -kPi2;
  const double exact_u = mittag_leffler(alpha, 1.0, z);
  const double exact_b = mittag_leffler(alpha, 2.0, z);
  struct Case {
    SchemeKind kind;
    double min_rate;
  };
  for (Case c : {Case{SchemeKind::ID2_BDF2, 1.8}, Case{SchemeKind::ID3_BDF3, 2.8}}) {
    const auto s = SchemeSpec::make(c.kind, alpha, 0.5);
    for (int which = 0; which < 2; ++which) {
      const double exact = which == 0 ? exact_u : exact_b;
      double previous = 0.0;
      for (std::size_t N : {64u, 128u, 256u, 512u}) {
        const auto p = which == 0 ? single_mode(1.0, 0.0, N) : single_mode(0.0, 1.0, N);
        const double err = std::abs(terminal_u(s, p) - exact);
        if (previous > 0.0) {
          CHECK_MESSAGE(std::log2(previous / err) >= c.min_rate,
                        scheme_name(c.kind) << " data=" << which << " N=" << N << " rate=" << std::log2(previous / err));
        }
        previous = err;
      }
      CHECK(previous < 1e-4);
    }
  }
}

TEST_CASE("subdiffusion converges with the initial correction") {
  const double alpha = 0.5;
  const double exact = mittag_leffler(alpha, 1.0, -kPi2);
  const auto s = SchemeSpec::make(SchemeKind::ID2_BDF2, alpha, 0.5);
  double previous = 0.0;
  for (std::size_t N : {64u, 128u, 256u, 512u}) {
    const double err = std::abs(terminal_u(s, single_mode(1.0, 0.0, N)) - exact);
    if (previous > 0.0) CHECK_MESSAGE(std::log2(previous / err) >= 1.8, "N=" << N);
    previous = err;
  }
}

TEST_CASE("the update is linear in data and noise") {
  const auto s = SchemeSpec::make(SchemeKind::ID2_BDF2, 1.7, 0.4);
  const std::size_t N = 64;
  const std::size_t J = 6;
  ModeField up(J);
  ModeField b(J);
  FoldedNoise g(4, N);
  for (std::size_t j = 0; j < J; ++j) {
    up[j] = 1.0 / static_cast<double>(j + 1);
    b[j] = std::cos(static_cast<double>(j));
  }
  for (std::size_t n = 0; n <= N; ++n) {
    for (std::size_t j = 0; j < 4; ++j) g.at(n, j) = std::sin(0.1 * static_cast<double>(n * (j + 1)));
  }
  const Stepper st(s, N);
  const auto all = st.step_all({up, b, 1.0, N}, g);
  const auto only_up = st.step_all({up, ModeField(J), 1.0, N});
  const auto only_b = st.step_all({ModeField(J), b, 1.0, N});
  const auto only_g = st.step_all({ModeField(J), ModeField(J), 1.0, N}, g);
  for (std::size_t n = 0; n <= N; ++n) {
    const auto sum = only_up[n] + only_b[n] + only_g[n];
    for (std::size_t j = 0; j < J; ++j) CHECK(std::abs(all[n][j] - sum[j]) < 1e-12);
  }
  // Undriven modes beyond the noise truncation see only the data.
  for (std::size_t n = 0; n <= N; ++n) CHECK(only_g[n][5] == 0.0);
  const auto tail = st.terminal({up, b, 1.0, N}, &g);
  for (std::size_t j = 0; j < J; ++j) CHECK(tail[j] == all.back()[j]);
}

TEST_CASE("BDF3 past the stability limit still runs") {
  const auto s = SchemeSpec::make(SchemeKind::ID3_BDF3, 1.95, 0.5);
  CHECK(s.stability_warning);
  const std::size_t J = 16;
  ModeField up(J);
  for (std::size_t j = 0; j < J; ++j) up[j] = 1.0 / static_cast<double>((j + 1) * (j + 1));
  const auto V = Stepper(s, 64).step_all({up, ModeField(J), 1.0, 64});
  for (const auto& v : V) CHECK(std::isfinite(l2_norm(v)));
}

TEST_CASE("stepper argument checks") {
  const auto s = SchemeSpec::make(SchemeKind::ID3_BDF3, 1.5, 0.5);
  const Stepper st(s, 16);
  CHECK_THROWS_AS(st.step_all(single_mode(1.0, 0.0, 32)), std::invalid_argument);
  CHECK_THROWS_AS(st.step_all(single_mode(1.0, 0.0, 16), FoldedNoise(1, 8)), std::invalid_argument);
  CHECK_THROWS_AS(st.step_all(single_mode(1.0, 0.0, 16), FoldedNoise(2, 16)), std::invalid_argument);
  const ProblemSpec mismatch{ModeField(2), ModeField(3), 1.0, 16};
  CHECK_THROWS_AS(st.step_all(mismatch), std::invalid_argument);
  CHECK_THROWS_AS(Stepper(s, 2).step_all(single_mode(1.0, 0.0, 2)), std::invalid_argument);
  ProblemSpec bad_t = single_mode(1.0, 0.0, 16);
  bad_t.T = -1.0;
  CHECK_THROWS_AS(st.step_all(bad_t), std::invalid_argument);
}
