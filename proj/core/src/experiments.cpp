#include "bo/experiments.hpp"

#include "bo/errors.hpp"
#include "bo/rng.hpp"
#include "bo/solver.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace bo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double hi = v[h];
  if (v.size() % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h)));
}

Eigen::VectorXd unit(const Eigen::VectorXd& v) {
  const double nv = v.norm();
  return nv > 0 ? Eigen::VectorXd(v / nv) : Eigen::VectorXd(v);
}

struct GridPoint {
  double scale = 0, lambda = 0;
};

// results[point][trial]
std::vector<std::vector<TrialSystem::Eval>> run_grid(const ProblemSpec& base,
                                                     const Eigen::VectorXd& mu_hat,
                                                     const std::vector<GridPoint>& grid,
                                                     const RunOptions& opt) {
  std::vector<std::vector<TrialSystem::Eval>> out(grid.size(),
                                                  std::vector<TrialSystem::Eval>(opt.trials));
  parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
    const Dataset ds = sample_dataset(base, opt.seed, t);
    const TrialSystem sys(ds, base.spectrum, mu_hat);
    for (std::size_t g = 0; g < grid.size(); ++g)
      out[g][t] = sys.evaluate(grid[g].scale, grid[g].lambda);
  });
  return out;
}

std::size_t resolve_k(const Spectrum& spec, double lambda_reg, int n, long k) {
  if (k >= 0) return static_cast<std::size_t>(k);
  return k_star(spec, lambda_reg, n).k;
}

void attach_bounds(SweepRecord& r, const Spectrum& spec, const Eigen::VectorXd& mu, int n,
                   double lambda_reg, double eta, const RunOptions& opt) {
  try {
    const auto qs = quantities(spec, mu, n, resolve_k(spec, lambda_reg, n, opt.k), lambda_reg, eta);
    r.qs = qs;
    r.be = lower_bound(qs, opt.t);
    r.bound_ratio = qs.tight_ratio();
  } catch (const Error&) {
    r.bound_ratio = kNaN;  // Lambda <= 0 or no k*: theory columns stay empty
  }
}

// One record per eps for a column of trial evaluations.
std::vector<SweepRecord> summarise(const SweepRecord& proto,
                                   const std::vector<TrialSystem::Eval>& evals, double eta,
                                   const RunOptions& opt) {
  std::vector<double> ratios, residuals, errors;
  std::size_t dropped = 0;
  for (const auto& e : evals) {
    if (!e.valid) {
      ++dropped;
      continue;
    }
    ratios.push_back(e.ratio);
    residuals.push_back(e.train_residual);
    errors.push_back(noisy_gaussian_error(e.ratio, eta));
  }
  std::vector<SweepRecord> rows;
  for (double eps : opt.eps) {
    SweepRecord r = proto;
    r.keys.emplace_back("eps", eps);
    r.q = quantile_of(ratios, eps, dropped);
    r.mean_ratio = ratios.empty() ? kNaN
                                  : std::accumulate(ratios.begin(), ratios.end(), 0.0) /
                                        double(ratios.size());
    r.train_residual_med = median(residuals);
    r.test_error_med = median(errors);
    r.seed = opt.seed;
    rows.push_back(std::move(r));
  }
  return rows;
}

void put(std::ostream& os, double v) {
  if (std::isfinite(v)) os << v;
}

}  // namespace

QuantileEstimate quantile_of(std::vector<double> samples, double eps, std::size_t dropped) {
  if (!(eps > 0 && eps < 1)) throw InvalidParams("eps must lie in (0, 1)");
  QuantileEstimate q;
  q.eps = eps;
  q.dropped = dropped;
  q.trials = samples.size();
  if (samples.empty()) {
    q.alpha_hat = q.ci_low = q.ci_high = kNaN;
    return q;
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t N = samples.size();
  const auto rank = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(eps * double(N) - 1e-9)), 1, N);
  // X_(j) <= q_eps  iff  #{X_i <= q_eps} >= j, and that count is Binomial(N, eps)
  const boost::math::binomial_distribution<> bin(double(N), eps);
  std::size_t lo = 1, hi = N;
  for (std::size_t j = 1; j <= N; ++j) {
    if (boost::math::cdf(bin, double(j - 1)) <= 0.025) lo = j;
    else break;
  }
  for (std::size_t j = rank; j <= N; ++j) {
    if (boost::math::cdf(bin, double(j - 1)) >= 0.975) {
      hi = j;
      break;
    }
  }
  lo = std::min(lo, rank);
  hi = std::max(hi, rank);
  q.alpha_hat = samples[rank - 1];
  q.ci_low = samples[lo - 1];
  q.ci_high = samples[hi - 1];
  return q;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mtx;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mtx);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

QuantileEstimate estimate_quantile(const ProblemSpec& problem, double eps, std::size_t trials,
                                   std::uint64_t master_seed, unsigned threads) {
  problem.validate();
  if (!(eps > 0 && eps < 1)) throw InvalidParams("eps must lie in (0, 1)");
  const auto need = static_cast<std::size_t>(std::ceil(10.0 / eps - 1e-9));
  if (trials < need)
    throw TooFewTrials("eps = " + std::to_string(eps) + " needs at least " +
                       std::to_string(need) + " trials");
  RunOptions opt;
  opt.seed = master_seed;
  opt.trials = trials;
  opt.threads = threads;
  const auto res =
      run_grid(problem, unit(problem.mu), {{problem.mu.norm(), problem.lambda_reg}}, opt);
  std::vector<double> ratios;
  std::size_t dropped = 0;
  for (const auto& e : res[0]) {
    if (e.valid) ratios.push_back(e.ratio);
    else ++dropped;
  }
  return quantile_of(std::move(ratios), eps, dropped);
}

std::vector<SweepRecord> sweep_mu_scale(const ProblemSpec& base, const Eigen::VectorXd& mu_dir,
                                        const std::vector<double>& scales,
                                        const RunOptions& opt) {
  base.validate();
  if (scales.empty()) throw InvalidParams("empty scale grid");
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (!(scales[i] > 0) || (i && !(scales[i] > scales[i - 1])))
      throw InvalidParams("scales must be positive and increasing");
  const Eigen::VectorXd mu_hat = unit(mu_dir);
  std::vector<GridPoint> grid;
  for (double m : scales) grid.push_back({m, base.lambda_reg});
  const auto res = run_grid(base, mu_hat, grid, opt);
  std::vector<SweepRecord> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRecord proto;
    proto.command = "sweep-mu";
    proto.keys = {{"mu_scale", scales[g]}};
    attach_bounds(proto, base.spectrum, scales[g] * mu_hat, base.n, base.lambda_reg, base.eta, opt);
    for (auto& r : summarise(proto, res[g], base.eta, opt)) rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRecord> sweep_lambda(const ProblemSpec& base, const std::vector<double>& lambdas,
                                      const RunOptions& opt) {
  base.validate();
  if (lambdas.empty()) throw InvalidParams("empty lambda grid");
  const double m = base.mu.norm();
  const Eigen::VectorXd mu_hat = unit(base.mu);
  std::vector<GridPoint> grid;
  for (double l : lambdas) grid.push_back({m, l});
  const auto res = run_grid(base, mu_hat, grid, opt);
  std::vector<SweepRecord> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRecord proto;
    proto.command = "sweep-lambda";
    proto.keys = {{"lambda_key", lambdas[g]}};
    attach_bounds(proto, base.spectrum, base.mu, base.n, lambdas[g], base.eta, opt);
    for (auto& r : summarise(proto, res[g], base.eta, opt)) rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRecord> phase_scan(const PhaseOptions& opt) {
  if (opt.q_grid.empty() || opt.n_grid.empty()) throw InvalidParams("empty phase grid");
  int n_emp = 0;
  if (opt.max_p > 0)
    for (int n : opt.n_grid)
      if (std::llround(std::pow(double(n), opt.s)) <= static_cast<long long>(opt.max_p))
        n_emp = std::max(n_emp, n);

  std::vector<SweepRecord> rows;
  for (double q : opt.q_grid) {
    for (int n : opt.n_grid) {
      const Spectrum spec = make_bilevel(n, opt.s, q, opt.r);
      const std::size_t k = std::min(bilevel_head(n, opt.r), spec.size() - 1);
      Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.size()));
      mu[0] = std::sqrt(2.0 * spec[0] / M_PI);
      SweepRecord proto;
      proto.command = "phase";
      proto.keys = {{"q", q}, {"n", double(n)}};
      RunOptions ro = opt.run;
      ro.k = static_cast<long>(k);
      attach_bounds(proto, spec, mu, n, 0.0, 0.0, ro);
      proto.bound_ratio = muthukumar_ratio(n, q, opt.r, opt.s);
      if (n == n_emp && ro.trials > 0) {
        ProblemSpec ps{spec, mu, n, 0.0, 0.0, Law::Gaussian};
        const auto res = run_grid(ps, unit(mu), {{mu.norm(), 0.0}}, ro);
        for (auto& r : summarise(proto, res[0], 0.0, ro)) rows.push_back(std::move(r));
      } else {
        proto.empirical = false;
        proto.seed = ro.seed;
        proto.q.alpha_hat = proto.q.ci_low = proto.q.ci_high = kNaN;
        proto.mean_ratio = proto.train_residual_med = proto.test_error_med = kNaN;
        proto.keys.emplace_back("eps", kNaN);
        rows.push_back(std::move(proto));
      }
    }
  }
  return rows;
}

double benign_scale(const Spectrum& spec, const Eigen::VectorXd& mu_dir, int n, std::size_t k) {
  const auto qs = quantities(spec, unit(mu_dir), n, k, 0.0, 0.0);
  if (!(qs.N > 0)) throw InvalidParams("mu direction carries no signal");
  // N scales as m^2, Diamond as m, V not at all
  const double b = 8.0 * std::sqrt(double(n)) * qs.diamond();
  const double c = 1.0 + 8.0 * std::sqrt(qs.V);
  return (b + std::sqrt(b * b + 4.0 * qs.N * c)) / (2.0 * qs.N);
}

std::vector<SweepRecord> benign_demo(const Spectrum& spec, const Eigen::VectorXd& mu_dir,
                                     double mu_scale, int n, double eta, const RunOptions& opt) {
  if (!(mu_scale > 0)) throw InvalidParams("mu_scale must be positive");
  const Eigen::VectorXd mu = mu_scale * unit(mu_dir);
  ProblemSpec ps{spec, mu, n, eta, 0.0, Law::Gaussian};
  ps.validate();
  const std::size_t k = resolve_k(spec, 0.0, n, opt.k);
  if (!quantities(spec, mu, n, k, 0.0, eta).precondition_ok)
    throw InvalidParams("tail effective-rank condition fails at k = " + std::to_string(k));
  const auto res = run_grid(ps, unit(mu_dir), {{mu_scale, 0.0}}, opt);
  SweepRecord proto;
  proto.command = "demo";
  proto.keys = {{"mu_scale", mu_scale}, {"eta", eta}};
  RunOptions ro = opt;
  ro.k = static_cast<long>(k);
  attach_bounds(proto, spec, mu, n, 0.0, eta, ro);
  return summarise(proto, res[0], eta, opt);
}

std::string sweep_csv_header(const SweepRecord& first) {
  std::string h;
  for (const auto& kv : first.keys) h += kv.first + ',';
  return h + "seed," + bounds_csv_header() +
         ",alpha_hat,ci_low,ci_high,trials,dropped,train_residual_med,test_error_med,"
         "mean_ratio,bound_ratio";
}

std::string sweep_csv_row(const SweepRecord& r) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& kv : r.keys) {
    put(os, kv.second);
    os << ',';
  }
  os << r.seed << ',';
  if (r.qs && r.be) {
    os << bounds_csv_row(*r.qs, *r.be);
  } else {
    os << std::string(17, ',');
  }
  os << ',';
  put(os, r.q.alpha_hat);
  os << ',';
  put(os, r.q.ci_low);
  os << ',';
  put(os, r.q.ci_high);
  os << ',';
  if (r.empirical) os << r.q.trials << ',' << r.q.dropped;
  else os << ',';
  for (double v : {r.train_residual_med, r.test_error_med, r.mean_ratio, r.bound_ratio}) {
    os << ',';
    put(os, v);
  }
  return os.str();
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidParams("cannot write " + path);
  if (rows.empty()) return;
  out << sweep_csv_header(rows.front()) << '\n';
  for (const auto& r : rows) out << sweep_csv_row(r) << '\n';
}

std::string sweep_file_name(const std::string& command, const std::string& timestamp,
                            std::uint64_t seed) {
  char hash[9];
  std::snprintf(hash, sizeof hash, "%08llx",
                static_cast<unsigned long long>(mix64(seed) >> 32));
  return command + '_' + timestamp + '_' + hash + ".csv";
}

}  // namespace bo
