#include "bo/bounds.hpp"
#include "bo/errors.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bo;
using doctest::Approx;

TEST_SUITE("bounds") {
  TEST_CASE("sigma_eta") {
    CHECK(sigma_eta(0.0) == 0.0);
    CHECK(sigma_eta(0.5) == Approx(1.0446801749517846792).epsilon(1e-14));
    CHECK(sigma_eta(0.1) == Approx(0.73092030367982136076).epsilon(1e-14));
  }

  TEST_CASE("isotropic quantities") {
    const Spectrum s = test::iso(100);
    const QuantitySet q = quantities(s, 2.0 * test::basis(100, 0), 10, 0, 0.0, 0.0);
    CHECK(q.Lambda == Approx(100));
    CHECK(q.V == Approx(0.1));
    CHECK(q.N == Approx(0.4));
    CHECK(q.Diamond2 == Approx(0.004));
    CHECK(q.DeltaV == Approx(10.0 / 1e4 + 110.0 / 1e4));
    CHECK(q.sigma_eta == 0.0);
    CHECK(q.precondition_ok);
    CHECK_THROWS_AS(quantities(s, test::basis(100, 0), 10, 0, -100.0, 0.0), InvalidParams);
  }

  TEST_CASE("lower bound") {
    const Spectrum s = test::iso(100);
    const QuantitySet q = quantities(s, 2.0 * test::basis(100, 0), 10, 0, 0.0, 0.0);
    const BoundEval b = lower_bound(q, 1.0);
    REQUIRE(b.ratio);
    CHECK(*b.ratio == Approx(0.6298431166334567).epsilon(1e-12));
    CHECK(b.noise_term == 0.0);
    CHECK(b.denominator == Approx(b.sqrtV + b.diamond_term));
    CHECK(b.t_in_domain);
    CHECK(!lower_bound(q, 4.0).t_in_domain);
    double prev = 1e300;
    for (double t = 0; t < 3; t += 0.25) {
      const BoundEval e = lower_bound(q, t);
      REQUIRE(e.ratio);
      CHECK(*e.ratio < prev);
      prev = *e.ratio;
    }
    const QuantitySet z = quantities(s, Eigen::VectorXd::Zero(100), 10, 0, 0.0, 0.3);
    const BoundEval bz = lower_bound(z, 1.0);
    CHECK(bz.numerator == 0.0);
    CHECK(!bz.ratio);
    const QuantitySet noisy = quantities(s, 2.0 * test::basis(100, 0), 10, 0, 0.0, 0.5);
    CHECK(lower_bound(noisy, 1.0).noise_term == Approx(0.4 * sigma_eta(0.5) * b.sqrtV));
  }

  TEST_CASE("k* and alternative forms") {
    const Spectrum sp = test::spiked(100, 100);
    const KStarSet ks = quantities_kstar(sp, test::basis(100, 0), 10, 0.0);
    CHECK(ks.k == 1);
    CHECK(ks.N == Approx(0.01));
    const Spectrum iso = test::iso(50);
    const QuantitySet q0 = quantities(iso, test::basis(50, 3), 10, 0, 0.0, 0.0);
    const KStarSet k0 = quantities_kstar(iso, test::basis(50, 3), 10, 0.0);
    CHECK(k0.k == 0);
    CHECK(k0.N == Approx(q0.N));
    CHECK(k0.V == Approx(q0.V));
    CHECK(k0.Diamond2 == Approx(q0.Diamond2));
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(50, 0.5);
    CHECK(quantities_alt(iso, mu, 10, 0, 0.0).N == Approx(mu.squaredNorm() / (1 + 50.0 / 10)));
    const AltSet a0 = quantities_alt(iso, Eigen::VectorXd::Zero(50), 10, 0, 0.0);
    CHECK(a0.N == 0.0);
    CHECK(a0.Diamond2 == 0.0);
  }

  TEST_CASE("Cao-Gu-Belkin comparison") {
    const Spectrum s = test::iso(2000);
    const Eigen::VectorXd mu = 3.0 * test::basis(2000, 0);
    CHECK(cgb_bound(s, mu, 50) == Approx(std::sqrt(50.0) * 9 / std::sqrt(50 * 9.0 + 2000 + 50)));
    CHECK(cgb_bound(s, Eigen::VectorXd::Zero(2000), 50) == 0.0);
    const BoundEval b = lower_bound(quantities(s, mu, 50, 0, 0.0, 0.0), 1.0);
    REQUIRE(b.ratio);
    CHECK(*b.ratio >= cgb_comparison_floor(s, mu, 50));
  }

  TEST_CASE("Wang-Thrampoulidis comparison") {
    const Spectrum iso = test::iso(500);
    const WangBound v = wang_bounds(iso, Eigen::VectorXd::Zero(500), 20, 0.0, WangVariant::Balanced);
    CHECK(v.vacuous);

    std::vector<double> vals(3000, 1.0);
    vals[0] = 400.0;
    const Spectrum bi = make_explicit(vals);
    const int n = 40;
    const Eigen::VectorXd mu = 4.0 * test::basis(3000, 1);
    const WangBound w = wang_bounds(bi, mu, n, 0.0, WangVariant::Bilevel, 2);
    const double L = 2999.0, ms = 4.0;
    CHECK(w.A == Approx(400 * (L + n * ms) / (n * 400 + L)));
    CHECK(w.B == Approx((1 + n / L * ms) * std::sqrt(2998.0)));
    CHECK(w.comparison_floor == Approx(16.0 / (6 * (w.A + w.B + 1 + ms))));
    const BoundEval b = lower_bound(quantities(bi, mu, n, 1, 0.0, 0.0), 1.0);
    REQUIRE(b.ratio);
    CHECK(*b.ratio >= w.comparison_floor);
    CHECK_THROWS_AS(wang_bounds(bi, mu, n, 0.0, WangVariant::Bilevel, 1), InvalidParams);
    CHECK_THROWS_AS(wang_bounds(bi, mu, n, 0.0, WangVariant::Bilevel, 3), InvalidParams);
  }

  TEST_CASE("Chatterji-Long comparison") {
    const ChatterjiArgs c = chatterji_scaled(4.0, 1e4, 100, 1.0);
    CHECK(c.theirs == Approx(0.04));
    CHECK(c.ours == Approx(0.4));
    const ChatterjiArgs one = chatterji_scaled(4.0, 1e4, 1, 1.0);
    CHECK(one.theirs == Approx(one.ours));
    CHECK_THROWS_AS(chatterji_scaled(4.0, 1e4, 100, 0.0), InvalidParams);
    CHECK_THROWS_AS(chatterji_scaled(4.0, 1e4, 100, 1.5), InvalidParams);
    const Spectrum s = test::iso(10000);
    const Eigen::VectorXd mu = 2.0 * test::basis(10000, 0);
    const BoundEval b = lower_bound(quantities(s, mu, 100, 0, 0.0, 0.1), 1.0);
    REQUIRE(b.ratio);
    CHECK(*b.ratio >= c.ours / 10);
  }

  TEST_CASE("bi-level phase transition values") {
    const double frozen[3][3] = {{0.430284, 0.535037, 0.623766},
                                 {0.299287, 0.320905, 0.334802},
                                 {0.175561, 0.128428, 0.088327}};
    const double qs[3] = {0.5, 0.75, 0.95};
    const int ns[3] = {100, 1000, 10000};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(muthukumar_ratio(ns[j], qs[i], 0.5, 1.5) == Approx(frozen[i][j]).epsilon(1e-5));
    CHECK_THROWS_AS(muthukumar_ratio(100, 0.5, 0.5, 0.9), InvalidParams);
    CHECK_THROWS_AS(muthukumar_ratio(100, 1.2, 0.5, 1.5), InvalidParams);
  }

  TEST_CASE("CSV contract") {
    CHECK(bounds_csv_header() ==
          "k,lambda,Lambda,V,DeltaV,B,Diamond2,M,N,sigma_eta,t,numerator,denominator,ratio,sqrtV,"
          "diamond_term,noise_term,precondition_ok");
    const QuantitySet q = quantities(test::iso(100), 2.0 * test::basis(100, 0), 10, 0, 0.0, 0.0);
    const std::string row = bounds_csv_row(q, lower_bound(q, 1.0));
    CHECK(std::count(row.begin(), row.end(), ',') == 17);
    CHECK(row.substr(0, 4) == "0,0,");
    CHECK(row.back() == '1');
    const QuantitySet z = quantities(test::iso(100), Eigen::VectorXd::Zero(100), 10, 0, 0.0, 0.0);
    std::istringstream cells(bounds_csv_row(z, lower_bound(z, 1.0)));
    std::string cell;
    for (int i = 0; i < 14; ++i) std::getline(cells, cell, ',');
    CHECK(cell.empty());
  }
}
