#include "bo/errors.hpp"
#include "bo/experiments.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <regex>

using namespace bo;
using doctest::Approx;

namespace {

std::vector<std::string> rows_of(const std::vector<SweepRecord>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs) out.push_back(sweep_csv_row(r));
  return out;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("quantile order statistic") {
    const QuantileEstimate a = quantile_of({5, 1, 4, 2, 3}, 0.4);
    CHECK(a.alpha_hat == 2);
    CHECK(quantile_of({5, 1, 4, 2, 3}, 0.5).alpha_hat == 3);
    std::vector<double> ten(10);
    for (int i = 0; i < 10; ++i) ten[i] = i;
    CHECK(quantile_of(ten, 0.3).alpha_hat == 2);  // rank 3 despite 0.3 * 10 > 3 in floating point
    CHECK(quantile_of(ten, 0.1).alpha_hat == 0);
    CHECK(quantile_of(ten, 1e-6).alpha_hat == 0);
    const QuantileEstimate q = quantile_of(ten, 0.5, 4);
    CHECK(q.ci_low <= q.alpha_hat);
    CHECK(q.alpha_hat <= q.ci_high);
    CHECK(q.trials == 10);
    CHECK(q.dropped == 4);
    CHECK(std::isnan(quantile_of({}, 0.5).alpha_hat));
  }

  TEST_CASE("quantile interval coverage on normal samples") {
    const double truth = -1.2815515655446004;  // 0.1-quantile of N(0, 1)
    std::mt19937_64 gen(1234);
    std::normal_distribution<double> nd;
    int covered = 0;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> s(400);
      for (auto& v : s) v = nd(gen);
      const QuantileEstimate q = quantile_of(s, 0.1);
      covered += q.ci_low <= truth && truth <= q.ci_high;
    }
    CHECK(covered >= 90);
  }

  TEST_CASE("too few trials") {
    const auto ps = test::problem(test::iso(100), test::basis(100, 0), 10);
    CHECK_THROWS_AS(estimate_quantile(ps, 0.1, 99, 1), TooFewTrials);
    CHECK_NOTHROW(estimate_quantile(ps, 0.1, 100, 1, 1));
  }

  TEST_CASE("quantiles are ordered in eps and grow with mu") {
    auto ps = test::problem(test::iso(300), 0.5 * test::basis(300, 0), 20);
    const QuantileEstimate lo = estimate_quantile(ps, 0.1, 200, 3, 1);
    const QuantileEstimate hi = estimate_quantile(ps, 0.9, 200, 3, 1);
    CHECK(lo.alpha_hat <= hi.alpha_hat);
    ps.mu = 50.0 * test::basis(300, 0);
    CHECK(estimate_quantile(ps, 0.9, 200, 3, 1).alpha_hat > 1.0);
  }

  TEST_CASE("small mu straddles zero and large mu separates") {
    const auto base = test::problem(test::iso(300), test::basis(300, 0), 20);
    RunOptions opt;
    opt.seed = 5;
    opt.trials = 400;
    opt.eps = {0.5};
    opt.threads = 1;
    const auto recs = sweep_mu_scale(base, test::basis(300, 0), {1e-3, 30.0}, opt);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].q.ci_low <= 0.0);
    CHECK(recs[0].q.ci_high >= 0.0);
    CHECK(recs[0].qs->N < 1e-6);
    CHECK(recs[1].q.ci_low > 0.0);
    CHECK(recs[1].keys.front().first == "mu_scale");
    CHECK(recs[1].keys.back().first == "eps");
  }

  TEST_CASE("replay and thread independence") {
    const auto base = test::problem(test::decaying(400, 0.3), test::basis(400, 2), 25, 0.1);
    RunOptions opt;
    opt.seed = 77;
    opt.trials = 100;
    opt.threads = 1;
    const auto a = rows_of(sweep_mu_scale(base, test::basis(400, 2), {0.5, 2.0}, opt));
    const auto b = rows_of(sweep_mu_scale(base, test::basis(400, 2), {0.5, 2.0}, opt));
    opt.threads = 3;
    const auto c = rows_of(sweep_mu_scale(base, test::basis(400, 2), {0.5, 2.0}, opt));
    CHECK(a == b);
    CHECK(a == c);
    opt.seed = 78;
    CHECK(a != rows_of(sweep_mu_scale(base, test::basis(400, 2), {0.5, 2.0}, opt)));
  }

  TEST_CASE("lambda below the floor everywhere") {
    const auto base = test::problem(test::iso(200), test::basis(200, 0), 20);
    RunOptions opt;
    opt.trials = 50;
    opt.eps = {0.25};
    const auto recs = sweep_lambda(base, {-1e6}, opt);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].q.dropped == 50);
    CHECK(recs[0].q.trials == 0);
    CHECK(std::isnan(recs[0].q.alpha_hat));
  }

  TEST_CASE("regime terms") {
    // spike well above Lambda/n: the Diamond sqrt n term dominates at m = sqrt(lambda_1)
    std::vector<double> v(100000, 1.0);
    v[0] = 1e4;
    const Spectrum spike = make_explicit(v);
    const QuantitySet q = quantities(spike, 100.0 * test::basis(v.size(), 0), 100, 1, 0.0, 0.0);
    CHECK(q.V < 0.05);
    CHECK(std::sqrt(100.0) * q.diamond() >= 4.0 * (1 + q.N) * std::sqrt(q.V));

    // mu on a tiny last direction: Diamond sqrt n never dominates
    std::vector<double> w(2000, 1.0);
    w.back() = 0.01;
    const Spectrum tail = make_explicit(w);
    for (double m : {1e-3, 0.1, 1.0, 10.0, 1e3, 1e5}) {
      const QuantitySet t = quantities(tail, m * test::basis(2000, 1999), 50, 0, 0.0, 0.0);
      CHECK((1 + t.N) * std::sqrt(t.V) >= 2.0 * std::sqrt(50.0) * t.diamond());
    }
  }

  TEST_CASE("tail-balance example favours negative lambda") {
    const CorollaryExample ex = make_corollary_example(CorollaryKind::TailBalance, 200, 10);
    const double tail = ex.spectrum.tail_sum(10);
    double best = -1, arg = 0;
    for (double f = -0.95; f <= 2.0; f += 0.05) {
      const QuantitySet q = quantities(ex.spectrum, ex.mu, 200, 10, f * tail, 0.0);
      if (q.tight_ratio() > best) best = q.tight_ratio(), arg = f;
    }
    CHECK(arg < 0);
    CHECK(ex.lambda_reg < 0);
  }

  TEST_CASE("isotropic sandwich with measured constant") {
    const auto base = test::problem(test::iso(500), test::basis(500, 0), 50);
    RunOptions opt;
    opt.seed = 9;
    opt.trials = 2000;
    opt.eps = {0.1};
    const auto recs = sweep_mu_scale(base, test::basis(500, 0), {3.0}, opt);
    REQUIRE(recs.size() == 1);
    const double a = recs[0].q.alpha_hat, b = recs[0].bound_ratio;
    REQUIRE(a > 0);
    const double c = std::max(a / b, b / a);
    MESSAGE("measured c = " << c);
    CHECK(c <= 10.0);
  }

  TEST_CASE("phase scan rows") {
    PhaseOptions po;
    po.q_grid = {0.5, 0.95};
    po.n_grid = {100, 400};
    po.max_p = 1000;  // 100^1.5 = 1000 affordable, 400^1.5 = 8000 not
    po.run.trials = 40;
    po.run.eps = {0.25, 0.5};
    const auto rows = phase_scan(po);
    CHECK(rows.size() == 2 * (2 + 1));
    for (const auto& r : rows) {
      CHECK(r.bound_ratio == Approx(muthukumar_ratio(int(r.keys[1].second), r.keys[0].second, 0.5, 1.5)));
      CHECK(r.empirical == (r.keys[1].second == 100));
    }
    po.max_p = 0;
    CHECK(phase_scan(po).size() == 4);
  }

  TEST_CASE("benign scale and demo preconditions") {
    std::vector<double> v(20000, 1.0);
    v[0] = 50;
    const Spectrum s = make_explicit(v);
    const Eigen::VectorXd e1 = test::basis(v.size(), 0);
    const double m = benign_scale(s, e1, 200, 1);
    const QuantitySet q = quantities(s, m * e1, 200, 1, 0.0, 0.0);
    CHECK(q.N == Approx(1 + 8 * (std::sqrt(q.V) + std::sqrt(200.0) * q.diamond())).epsilon(1e-10));
    RunOptions opt;
    opt.trials = 20;
    opt.eps = {0.5};
    CHECK_THROWS_AS(benign_demo(test::iso(50), test::basis(50, 0), 1.0, 100, 0.0, opt), InvalidParams);
    const auto demo = benign_demo(test::iso(3000), test::basis(3000, 0), 200.0, 30, 0.0, opt);
    REQUIRE(demo.size() == 1);
    CHECK(demo[0].train_residual_med <= 1e-8);
    CHECK(demo[0].test_error_med < 1e-6);
  }

  TEST_CASE("CSV contract and file naming") {
    const auto base = test::problem(test::iso(100), test::basis(100, 0), 10);
    RunOptions opt;
    opt.trials = 40;
    opt.eps = {0.25, 0.5};
    const auto recs = sweep_lambda(base, {0.0, 1.0}, opt);
    CHECK(recs.size() == 4);
    const std::string h = sweep_csv_header(recs.front());
    CHECK(h.rfind("lambda_key,eps,seed,k,lambda,Lambda,", 0) == 0);
    CHECK(h.size() > 20);
    CHECK(h.substr(h.size() - 22) == "mean_ratio,bound_ratio");
    const auto ncols = std::count(h.begin(), h.end(), ',');
    for (const auto& r : recs) {
      const std::string row = sweep_csv_row(r);
      CHECK(std::count(row.begin(), row.end(), ',') == ncols);
    }
    const auto dir = test::scratch_dir("csv");
    write_sweep_csv((dir / "x.csv").string(), recs);
    std::ifstream in(dir / "x.csv");
    std::string first;
    std::getline(in, first);
    CHECK(first == h);

    const std::string name = sweep_file_name("sweep-mu", "20260101T000000Z", 42);
    CHECK(std::regex_match(name, std::regex("sweep-mu_20260101T000000Z_[0-9a-f]{8}\\.csv")));
    CHECK(name == sweep_file_name("sweep-mu", "20260101T000000Z", 42));
    CHECK(name != sweep_file_name("sweep-mu", "20260101T000000Z", 43));
  }
}
