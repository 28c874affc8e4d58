#pragma once

#include "bo/bounds.hpp"
#include "bo/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bo {

struct QuantileEstimate {
  double eps = 0;
  double alpha_hat = 0;
  double ci_low = 0, ci_high = 0;  // 95% order-statistic interval
  std::size_t trials = 0;          // samples that entered the quantile
  std::size_t dropped = 0;         // excluded as degenerate / below the lambda floor
};

// Order statistic ceil(eps N) with a distribution-free binomial interval.
QuantileEstimate quantile_of(std::vector<double> samples, double eps, std::size_t dropped = 0);

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::vector<double> eps = {0.05, 0.1, 0.25};
  double t = 0.0;        // deviation parameter for the reported BoundEval
  long k = -1;           // split index for the quantity set, -1 = k*
};

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be
// written to per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

QuantileEstimate estimate_quantile(const ProblemSpec& problem, double eps, std::size_t trials,
                                   std::uint64_t master_seed, unsigned threads = 0);

struct SweepRecord {
  std::string command;
  std::vector<std::pair<std::string, double>> keys;  // sweep key columns
  std::optional<QuantitySet> qs;
  std::optional<BoundEval> be;
  QuantileEstimate q;
  double mean_ratio = 0;
  double train_residual_med = 0;
  double test_error_med = 0;
  double bound_ratio = 0;  // N / (sqrt V + sqrt n Diamond)
  std::uint64_t seed = 0;
  bool empirical = true;   // false when no trials were run for this row
};

// One record per (scale, eps). mu = scale * mu_hat with mu_hat normalised.
std::vector<SweepRecord> sweep_mu_scale(const ProblemSpec& base, const Eigen::VectorXd& mu_dir,
                                        const std::vector<double>& scales, const RunOptions& opt);
// One record per (lambda, eps); mu is base.mu.
std::vector<SweepRecord> sweep_lambda(const ProblemSpec& base, const std::vector<double>& lambdas,
                                      const RunOptions& opt);

struct PhaseOptions {
  double r = 0.5, s = 1.5;
  std::vector<double> q_grid;
  std::vector<int> n_grid;
  std::size_t max_p = 0;  // empirical alpha at the largest n with p <= max_p (0 disables)
  RunOptions run;
};
std::vector<SweepRecord> phase_scan(const PhaseOptions& opt);

// Smallest scale m with N >= 1 + 8 (sqrt V + Diamond sqrt n) for mu = m mu_hat.
double benign_scale(const Spectrum& spec, const Eigen::VectorXd& mu_dir, int n, std::size_t k);

// lambda = 0 interpolation run; one record per eps.
std::vector<SweepRecord> benign_demo(const Spectrum& spec, const Eigen::VectorXd& mu_dir,
                                     double mu_scale, int n, double eta, const RunOptions& opt);

// CSV contract: key columns, bounds columns, then the empirical block.
std::string sweep_csv_header(const SweepRecord& first);
std::string sweep_csv_row(const SweepRecord& r);
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& rows);
// <command>_<timestamp>_<seedhash>.csv
std::string sweep_file_name(const std::string& command, const std::string& timestamp,
                            std::uint64_t seed);

}  // namespace bo
