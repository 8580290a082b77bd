#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "perfbench/stats.hpp"
#include "testutil.hpp"

using namespace perfbench;

namespace {

// High-precision reference points, frozen from an independent
// arbitrary-precision evaluation of I_x(a, b).
struct IbetaPoint {
  double a, b, x, expected;
};
constexpr IbetaPoint kIbetaPoints[] = {
    {0.5, 0.5, 0.3, 0.36901011956554537504},
    {2.0, 0.5, 0.8, 0.37390096630005894459},
    {2.0, 3.0, 0.4, 0.52480000000000003837},
    {10.0, 0.5, 0.95, 0.31715157546554505738},
    {0.5, 10.0, 0.05, 0.68284842453445473585},
    {14.65, 0.5, 0.9, 0.081471388441818454317},
    {5.0, 5.0, 0.5, 0.5},
    {1.0, 1.0, 0.123, 0.123},
    {30.0, 0.5, 0.999, 0.80723730615953703126},
    {2.5, 0.5, 0.2, 0.0065662718275630070989},
};

struct TPoint {
  double t, df, expected;
};
constexpr TPoint kTPoints[] = {
    {3.674234614174767, 4.0, 0.021311641128756731941},
    {1.0, 1.0, 0.5},
    {2.5, 7.3, 0.039650234665600471608},
    {0.5, 29.0, 0.62084808419378136402},
    {12.0, 2.0, 0.0068729336771584601411},
    {0.05, 3.5, 0.96284266814203258484},
};

}  // namespace

TEST_CASE("incomplete beta matches reference points to 1e-10 relative") {
  for (const auto& p : kIbetaPoints) {
    const double got = stats::incomplete_beta(p.a, p.b, p.x);
    CHECK(testutil::approx_rel(got, p.expected, 1e-10));
  }
  CHECK(stats::incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(stats::incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK_THROWS(stats::incomplete_beta(0.0, 1.0, 0.5));
  CHECK_THROWS(stats::incomplete_beta(1.0, 1.0, 1.5));
}

TEST_CASE("t two-sided tail matches reference points") {
  for (const auto& p : kTPoints) {
    const double got = stats::student_t_two_sided_p(p.t, p.df);
    CHECK(testutil::approx_rel(got, p.expected, 1e-10));
    // symmetric in t
    CHECK(stats::student_t_two_sided_p(-p.t, p.df) == got);
  }
  CHECK(stats::student_t_two_sided_p(0.0, 5.0) == 1.0);
}

TEST_CASE("welch test on the 1,2,3 vs 4,5,6 example") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6};
  const auto r = stats::welch_t_test(a, b);
  CHECK(r.t == doctest::Approx(-3.674234614174767).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.021311641128756731941).epsilon(1e-10));
}

TEST_CASE("welch on identical samples is a null result") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const auto r = stats::welch_t_test(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("welch degenerate zero-variance samples") {
  const std::vector<double> a{2, 2, 2};
  const std::vector<double> b{2, 2};
  const auto same = stats::welch_t_test(a, b);
  CHECK(same.t == 0.0);
  CHECK(same.p_value == 1.0);

  const std::vector<double> c{3, 3};
  const auto diff = stats::welch_t_test(a, c);
  CHECK(diff.p_value == 0.0);
  CHECK(std::isinf(diff.t));
}

TEST_CASE("welch antisymmetry and scale invariance") {
  std::mt19937 gen(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testutil::random_vector(gen, 2 + gen() % 20, 0.0, 3.0);
    const auto b = testutil::random_vector(gen, 2 + gen() % 20, 0.5, 4.0);
    const auto ab = stats::welch_t_test(a, b);
    const auto ba = stats::welch_t_test(b, a);
    CHECK(ab.t == -ba.t);
    CHECK(ab.df == ba.df);
    CHECK(ab.p_value == ba.p_value);
    CHECK(ab.p_value >= 0.0);
    CHECK(ab.p_value <= 1.0);
    CHECK(ab.df >= static_cast<double>(std::min(a.size(), b.size())) - 1.0);

    // power-of-two scaling is exact in floating point
    auto a2 = a;
    auto b2 = b;
    for (auto& x : a2) x *= 4.0;
    for (auto& x : b2) x *= 4.0;
    const auto scaled = stats::welch_t_test(a2, b2);
    CHECK(scaled.t == ab.t);
    CHECK(scaled.df == ab.df);
    CHECK(scaled.p_value == ab.p_value);

    auto a3 = a;
    auto b3 = b;
    for (auto& x : a3) x *= 3.7;
    for (auto& x : b3) x *= 3.7;
    const auto scaled2 = stats::welch_t_test(a3, b3);
    CHECK(testutil::approx_rel(scaled2.t, ab.t, 1e-9));
    CHECK(testutil::approx_rel(scaled2.p_value, ab.p_value, 1e-9));
  }
}

TEST_CASE("mann-whitney on the most extreme 2x2 ordering") {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{3, 4};
  const auto r = stats::mann_whitney_test(a, b);
  CHECK(r.u_a == 0.0);
  CHECK(r.u_b == 4.0);
  CHECK(r.z == doctest::Approx(-1.1618950038622251).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.24527811680677284).epsilon(1e-12));

  // the exact two-sided p over all 6 orderings is 1/3
  const double exact = testutil::mw_exact_two_sided_p(2, 2, r.u_a);
  CHECK(exact == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mann-whitney approximation tracks enumeration for n in 3..8") {
  std::mt19937 gen(99);
  for (std::size_t n = 3; n <= 8; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = testutil::random_vector(gen, n);
      const auto b = testutil::random_vector(gen, n);
      const auto r = stats::mann_whitney_test(a, b);
      const double exact = testutil::mw_exact_two_sided_p(n, n, r.u_a);
      CHECK(std::abs(r.p_value - exact) <= 0.05);
    }
  }
}

TEST_CASE("mann-whitney u statistics partition the pair count") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t na = 2 + gen() % 12;
    const std::size_t nb = 2 + gen() % 12;
    const auto a = testutil::random_vector(gen, na);
    const auto b = testutil::random_vector(gen, nb);
    const auto r = stats::mann_whitney_test(a, b);
    CHECK(r.u_a + r.u_b == doctest::Approx(static_cast<double>(na * nb)));
    CHECK(r.u_a == doctest::Approx(testutil::mw_u_statistic(a, b)));
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);

    const auto swapped = stats::mann_whitney_test(b, a);
    CHECK(swapped.u_a == doctest::Approx(r.u_b));
    CHECK(swapped.p_value == doctest::Approx(r.p_value));
  }
}

TEST_CASE("mann-whitney with every value tied") {
  const std::vector<double> a{5, 5, 5};
  const std::vector<double> b{5, 5};
  const auto r = stats::mann_whitney_test(a, b);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("mann-whitney midranks handle partial ties") {
  // a = {1, 2, 2}, b = {2, 3}: midrank of the three 2s is 3.
  const std::vector<double> a{1, 2, 2};
  const std::vector<double> b{2, 3};
  const auto r = stats::mann_whitney_test(a, b);
  CHECK(r.u_a == doctest::Approx(1.0 + 3.0 + 3.0 - 6.0));  // rank sum 7, minus 3*4/2
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
}

TEST_CASE("input validation") {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS(stats::welch_t_test(one, two));
  CHECK_THROWS(stats::mann_whitney_test(two, one));
  CHECK_THROWS(stats::mean({}));
}
