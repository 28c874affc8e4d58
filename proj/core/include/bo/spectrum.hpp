#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace bo {

// Eigenvalues of a diagonal covariance, nonincreasing and strictly positive.
// Tail sums are cached once (compensated, back to front) because sweeps ask
// for Lambda(k) at every k.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> values);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  // lambda_{i+1} in 1-based notation, 0 past the end
  double at_or_zero(std::size_t i) const { return i < size() ? (*this)[i] : 0.0; }

  // sum_{i>k} lambda_i and sum_{i>k} lambda_i^2 (1-based i), k in [0, p]
  double tail_sum(std::size_t k) const { return tail_[k]; }
  double tail_sq_sum(std::size_t k) const { return tail_sq_[k]; }

 private:
  Eigen::VectorXd values_;
  std::vector<double> tail_;
  std::vector<double> tail_sq_;
};

struct TailSummary {
  std::size_t k = 0;
  double lambda_reg = 0.0;
  double Lambda = 0.0;
  double tail_sq_sum = 0.0;
  double margin = 0.0;  // Lambda / max(n lambda_{k+1}, sqrt(n sum lambda_i^2))
};

Spectrum make_explicit(std::vector<double> values);
Spectrum make_bilevel(int n, double s, double q, double r);
// head size used by make_bilevel: number of i with i <= n^r
std::size_t bilevel_head(int n, double r);

enum class CorollaryKind { TailBalance, GeometryDestroy };

struct CorollaryParams {
  double a = 4.0;    // tail-balance: n > a, k < n/a
  double b = 0.0;    // 0 picks the kind's default
  double c = 2.0;    // geometry-destroy tail level c n/(p k^4)
  double c1 = 2.0;   // Lambda(0) = c1 Lambda(lambda)
  std::size_t p = 0; // geometry-destroy dimension, 0 -> 20 n
  double truncation = 1e-10;
};

struct CorollaryExample {
  Spectrum spectrum;
  Eigen::VectorXd mu;
  double lambda_reg;
  CorollaryParams params;  // resolved defaults
  std::string binding;     // tightest precondition, "name=slack"
};

CorollaryExample make_corollary_example(CorollaryKind kind, int n, int k,
                                        CorollaryParams params = {});
CorollaryKind corollary_kind_from(const std::string& name);

double lambda_tail(const Spectrum& spec, std::size_t k, double lambda_reg);
TailSummary tail_summary(const Spectrum& spec, std::size_t k, double lambda_reg, int n);

struct KStar {
  std::size_t k = 0;
  double Lambda = 0.0;
};

// Smallest kappa with lambda + sum_{i>kappa} lambda_i >= n lambda_{kappa+1};
// strict=true uses the ">" form of the introduction instead.
KStar k_star(const Spectrum& spec, double lambda_reg, int n, bool strict = false);

// one eigenvalue per line
Spectrum load_spectrum(const std::string& path);
void save_spectrum(const Spectrum& spec, const std::string& path);

}  // namespace bo
