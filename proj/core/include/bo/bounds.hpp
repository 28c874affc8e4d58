#pragma once

#include "bo/spectrum.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace bo {

struct QuantitySet {
  std::size_t k = 0;
  int n = 0;
  double lambda_reg = 0;
  double Lambda = 0, V = 0, DeltaV = 0, B = 0, Diamond2 = 0, M = 0, N = 0, sigma_eta = 0;
  bool precondition_ok = false;  // k <= n and Lambda > n lambda_{k+1} v sqrt(n sum lambda_i^2)

  double diamond() const;
  // N / (sqrt V + sqrt n Diamond): the noiseless two-sided quantity
  double tight_ratio() const;
  // N / sqrt(V + n Diamond^2): the upper-bound expression
  double upper_ratio() const;
};

struct BoundEval {
  double t = 0;
  double numerator = 0;
  double denominator = 0;
  std::optional<double> ratio;  // only when numerator > 0
  double sqrtV = 0;             // sqrt(V + t^2 DeltaV)
  double diamond_term = 0;      // Diamond sqrt n
  double noise_term = 0;        // N sigma_eta sqrt(V + t^2 DeltaV)
  bool t_in_domain = true;      // t < sqrt n
};

double sigma_eta(double eta);

QuantitySet quantities(const Spectrum& spec, const Eigen::VectorXd& mu, int n, std::size_t k,
                       double lambda_reg, double eta);
BoundEval lower_bound(const QuantitySet& qs, double t);

struct KStarSet {
  std::size_t k = 0;
  double Lambda = 0, V = 0, Diamond2 = 0, N = 0;
};
KStarSet quantities_kstar(const Spectrum& spec, const Eigen::VectorXd& mu, int n,
                          double lambda_reg, bool strict = false);

struct AltSet {
  double Lambda = 0, N = 0, V = 0, Diamond2 = 0;
};
// full-spectrum sums with Lambda = lambda + sum_{i>k} lambda_i
AltSet quantities_alt(const Spectrum& spec, const Eigen::VectorXd& mu, int n, std::size_t k,
                      double lambda_reg);
// same sums at an arbitrary Lambda (used for the monotonicity check)
AltSet quantities_alt_at(const Spectrum& spec, const Eigen::VectorXd& mu, int n, double Lambda);

double cgb_bound(const Spectrum& spec, const Eigen::VectorXd& mu, int n);
// 1/4 n|mu|^2 / (n|mu|_Sigma + sqrt n |Sigma|_F + n|Sigma|)
double cgb_comparison_floor(const Spectrum& spec, const Eigen::VectorXd& mu, int n);

struct WangBound {
  double value = 0;
  double numerator = 0, denominator = 0;
  double A = 0, B = 0;  // bi-level only
  bool vacuous = false;
  double comparison_floor = 0;  // bi-level: 1/6 |mu|^2/(A + B + lambda_j + |mu|_Sigma)
};
enum class WangVariant { Balanced, Bilevel };
// j is the 1-based support index of mu for the bi-level variant
WangBound wang_bounds(const Spectrum& spec, const Eigen::VectorXd& mu, int n, double lambda_reg,
                      WangVariant variant, std::size_t j = 0);

struct ChatterjiArgs {
  double theirs = 0;  // |mu|^2 / sqrt p
  double ours = 0;    // |mu|^2 sqrt(n kappa) / sqrt p
};
ChatterjiArgs chatterji_scaled(double mu_sq_norm, double p, int n, double kappa);

double muthukumar_ratio(int n, double q, double r, double s);

// CSV contract
std::string bounds_csv_header();
std::string bounds_csv_row(const QuantitySet& qs, const BoundEval& be);

}  // namespace bo
