#include "bo/errors.hpp"
#include "bo/spectrum.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace bo;
using doctest::Approx;

TEST_SUITE("spectrum") {
  TEST_CASE("make_explicit validates") {
    CHECK(make_explicit({2, 1, 1, 1}).size() == 4);
    CHECK_THROWS_AS(make_explicit({1, 2}), InvalidSpectrum);
    CHECK_THROWS_AS(make_explicit({1, 0}), InvalidSpectrum);
    CHECK_THROWS_AS(make_explicit({}), InvalidSpectrum);
  }

  TEST_CASE("make_bilevel levels") {
    const Spectrum s = make_bilevel(100, 1.5, 0.5, 0.5);
    REQUIRE(s.size() == 1000);
    for (std::size_t i = 0; i < 10; ++i) CHECK(s[i] == Approx(10.0).epsilon(1e-14));
    CHECK(s[10] < s[9]);
    // q = 0 leaves a zero tail
    CHECK_THROWS_AS(make_bilevel(100, 1.5, 0.0, 0.5), InvalidSpectrum);
    // independent high-precision evaluation of (1 - 10^-0.5)/(1 - 10^-1)
    const Spectrum t = make_bilevel(10, 1.5, 0.5, 0.5);
    CHECK(t[t.size() - 1] == Approx(0.759746926647957852).epsilon(1e-14));
    CHECK_THROWS_AS(make_bilevel(100, 0.9, 0.1, 0.5), InvalidParams);
    CHECK_THROWS_AS(make_bilevel(100, 1.5, 1.0, 0.5), InvalidParams);
    CHECK_THROWS_AS(make_bilevel(100, 1.5, 0.5, 1.0), InvalidParams);
  }

  TEST_CASE("make_bilevel satisfies the spectrum invariants on a grid") {
    for (int n : {10, 37, 100})
      for (double s : {1.2, 1.5, 2.0})
        for (double r : {0.0, 0.3, 0.5})
          for (double q : {0.1, 0.5, 0.9 * (s - r)}) {
            const Spectrum sp = make_bilevel(n, s, q, r);
            CHECK(sp[0] >= sp[sp.size() - 1]);
          }
  }

  TEST_CASE("corollary constructions") {
    const auto g = make_corollary_example(CorollaryKind::GeometryDestroy, 200, 20);
    CHECK(g.spectrum[0] == Approx(0.54928027165305885784).epsilon(1e-14));
    CHECK(g.spectrum.size() == 4000);
    CHECK(g.lambda_reg < 0);
    CHECK(g.lambda_reg == Approx(-0.5 * g.spectrum.tail_sum(20)));
    CHECK(g.mu.tail(g.mu.size() - 20).isZero());
    CHECK(!g.binding.empty());

    CHECK_THROWS_AS(make_corollary_example(CorollaryKind::TailBalance, 200, 0), InvalidParams);
    const auto t = make_corollary_example(CorollaryKind::TailBalance, 200, 10);
    CHECK(t.spectrum[0] == 2 * t.params.b);
    CHECK(t.params.b == 4.0);
    // truncation: omitted mass below 1e-10 Lambda
    const double last = t.spectrum[t.spectrum.size() - 1];
    const double r = std::exp(-1.0 / (t.params.b * 200));
    CHECK(last * r / (1 - r) < 1e-10 * lambda_tail(t.spectrum, 10, t.lambda_reg));
    CHECK(tail_summary(t.spectrum, 10, t.lambda_reg, 200).margin > 1.0);
    CHECK(corollary_kind_from("geometry-destroy") == CorollaryKind::GeometryDestroy);
    CHECK_THROWS_AS(corollary_kind_from("other"), InvalidParams);
  }

  TEST_CASE("lambda_tail") {
    const Spectrum s = make_explicit({2, 1, 1, 1});
    CHECK(lambda_tail(s, 1, 0.5) == 3.5);
    CHECK(lambda_tail(test::iso(100), 0, 0.0) == 100.0);
    CHECK(lambda_tail(s, 3, -0.9) == Approx(0.1).epsilon(1e-12));
    const Spectrum d = test::decaying(500, 0.7);
    for (std::size_t k = 0; k + 1 < d.size(); ++k)
      CHECK(lambda_tail(d, k, 0.3) ==
            Approx(lambda_tail(d, k + 1, 0.3) + d[k]).epsilon(1e-12));
  }

  TEST_CASE("tail_summary margin") {
    const auto t = tail_summary(test::iso(100), 0, 0.0, 10);
    CHECK(t.Lambda == 100);
    CHECK(t.tail_sq_sum == 100);
    CHECK(t.margin == Approx(100.0 / std::sqrt(1000.0)));
  }

  TEST_CASE("k_star") {
    auto a = k_star(test::iso(100), 0.0, 10);
    CHECK(a.k == 0);
    CHECK(a.Lambda == 100);
    auto b = k_star(test::spiked(100, 100), 0.0, 10);
    CHECK(b.k == 1);
    CHECK(b.Lambda == 99);
    CHECK_THROWS_AS(k_star(make_explicit({1}), 0.0, 10), NoKStar);
    // strict variant differs exactly at equality: [10, 1 x 10], n = 2 -> 20 >= 20
    const Spectrum eq = make_explicit({10, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    CHECK(k_star(eq, 0.0, 2).k == 0);
    CHECK(k_star(eq, 0.0, 2, true).k == 1);
  }

  TEST_CASE("k_star is nonincreasing in lambda") {
    const Spectrum d = test::decaying(2000, 1.1);
    std::size_t prev = SIZE_MAX;
    for (double lam : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
      const auto k = k_star(d, lam, 50).k;
      CHECK(k <= prev);
      prev = k;
    }
  }

  TEST_CASE("spectrum file round trip") {
    const auto dir = test::scratch_dir("spectrum");
    const Spectrum d = test::decaying(50, 0.5);
    save_spectrum(d, (dir / "s.txt").string());
    const Spectrum e = load_spectrum((dir / "s.txt").string());
    REQUIRE(e.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(e[i] == d[i]);
  }
}
