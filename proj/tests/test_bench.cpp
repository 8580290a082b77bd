#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <stdexcept>
#include <thread>

#include "perfbench/bench.hpp"
#include "perfbench/stats.hpp"

using namespace perfbench;

namespace {

void sleep_ms(double ms) {
  std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

}  // namespace

TEST_CASE("measure returns reps nonnegative samples for a no-op task") {
  const auto s = bench::measure("noop", [] {}, 3, 0);
  CHECK(s.reps == 3);
  CHECK(s.seconds.size() == 3);
  for (double t : s.seconds) {
    CHECK(t >= 0.0);
    CHECK(t < 0.001);  // an empty task cannot take a millisecond
  }
}

TEST_CASE("measure excludes warmup and honors the sleep lower bound") {
  int calls = 0;
  const auto s = bench::measure(
      "sleep50", [&] { ++calls; sleep_ms(50.0); }, 2, 1);
  CHECK(calls == 3);  // 1 warmup + 2 timed
  CHECK(s.seconds.size() == 2);
  for (double t : s.seconds) {
    CHECK(t >= 0.050);        // the OS never wakes a sleep early
    CHECK(t < 0.050 + 0.05);  // generous scheduler-jitter allowance
  }
}

TEST_CASE("measure rejects reps < 1") {
  CHECK_THROWS_WITH_AS(bench::measure("x", [] {}, 0, 0),
                       "measure: reps must be >= 1", std::invalid_argument);
}

TEST_CASE("a throwing task aborts measurement and reports completed reps") {
  int calls = 0;
  try {
    bench::measure(
        "boom",
        [&] {
          if (++calls == 3) throw std::runtime_error("kaput");
        },
        5, 0);
    FAIL("expected MeasureError");
  } catch (const bench::MeasureError& e) {
    CHECK(e.completed_reps == 2);
    CHECK(std::string(e.what()).find("kaput") != std::string::npos);
  }
}

TEST_CASE("median of measured sleeps is nondecreasing in the sleep time") {
  double prev_median = 0.0;
  for (double ms : {1.0, 4.0, 12.0}) {
    const auto s = bench::measure("sleep", [&] { sleep_ms(ms); }, 3, 0);
    const double med = stats::median(s.seconds);
    CHECK(med >= prev_median);
    prev_median = med;
  }
}

TEST_CASE("compare on identical samples is inconclusive") {
  bench::TimingSamples a{"a", {1, 2, 3, 4, 5}, 5};
  const auto v = bench::compare(a, a, bench::Method::welch_t, 0.05);
  CHECK(v.statistic == 0.0);
  CHECK(v.p_value == 1.0);
  CHECK(v.faster == bench::Faster::inconclusive);
  CHECK(v.mean_a == v.mean_b);
}

TEST_CASE("compare resolves the welch example and flips with its arguments") {
  bench::TimingSamples a{"a", {1, 2, 3}, 3};
  bench::TimingSamples b{"b", {4, 5, 6}, 3};
  const auto v = bench::compare(a, b, bench::Method::welch_t, 0.05);
  CHECK(v.statistic == doctest::Approx(-3.674234614174767).epsilon(1e-12));
  CHECK(v.p_value == doctest::Approx(0.0213116411287567).epsilon(1e-9));
  CHECK(v.faster == bench::Faster::A);

  const auto w = bench::compare(b, a, bench::Method::welch_t, 0.05);
  CHECK(w.statistic == -v.statistic);
  CHECK(w.p_value == v.p_value);
  CHECK(w.faster == bench::Faster::B);
}

TEST_CASE("compare via mann-whitney on the extreme 2x2 ordering") {
  bench::TimingSamples a{"a", {1, 2}, 2};
  bench::TimingSamples b{"b", {3, 4}, 2};
  const auto v = bench::compare(a, b, bench::Method::mann_whitney, 0.3);
  CHECK(v.statistic == 0.0);  // U of a
  CHECK(v.p_value == doctest::Approx(0.24527811680677284).epsilon(1e-12));
  CHECK(v.faster == bench::Faster::A);  // 0.245 <= 0.3
  const auto inconclusive = bench::compare(a, b, bench::Method::mann_whitney, 0.05);
  CHECK(inconclusive.faster == bench::Faster::inconclusive);
}

TEST_CASE("compare validates its inputs") {
  bench::TimingSamples ok{"a", {1, 2, 3}, 3};
  bench::TimingSamples tiny{"b", {1}, 1};
  CHECK_THROWS(bench::compare(ok, tiny, bench::Method::welch_t, 0.05));
  CHECK_THROWS(bench::compare(ok, ok, bench::Method::welch_t, 0.0));
  CHECK_THROWS(bench::compare(ok, ok, bench::Method::welch_t, 1.0));
}

TEST_CASE("vector memory estimates") {
  CHECK(bench::estimate_vector_memory(10000000).bytes == 80000000ull);
  CHECK(bench::estimate_vector_memory(0).bytes == 0ull);
  CHECK(bench::estimate_vector_memory(1).bytes == 8ull);
}
