#pragma once

#include "bo/model.hpp"
#include "bo/spectrum.hpp"

#include <Eigen/Core>

namespace bo {

// lambda below -(1 - kFloorSlack) mu_n(QQ^T) is rejected
inline constexpr double kFloorSlack = 1e-6;

inline double lambda_floor(double min_eig_qqt) { return -(1.0 - kFloorSlack) * min_eig_qqt; }

// A = lambda I + QQ^T through the eigendecomposition of QQ^T, so changing
// lambda is free and mu_n(QQ^T) comes along for the validity check.
class GramState {
 public:
  GramState(const Eigen::MatrixXd& qqt, double lambda_reg);

  double lambda_reg() const { return lambda_; }
  double min_eig_QQt() const { return evals_[0]; }
  int n() const { return static_cast<int>(evals_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }  // of QQ^T, ascending
  const Eigen::MatrixXd& eigenvectors() const { return U_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;  // A^{-1} v
  Eigen::MatrixXd solve(const Eigen::MatrixXd& M) const;
  Eigen::MatrixXd A() const;
  GramState with_lambda(double lambda_reg) const;

 private:
  GramState() = default;
  void check() const;

  Eigen::MatrixXd U_;
  Eigen::VectorXd evals_;
  double lambda_ = 0.0;
};

Eigen::MatrixXd qqt(const Eigen::MatrixXd& Q);
GramState gram(const Dataset& ds, double lambda_reg);

struct DecompScalars {
  double yAy = 0, yAyh = 0, nuAy = 0, nuAyh = 0, nuAdy = 0, dyAy = 0, mu_mu_perp = 0;
};

struct RidgeSolution {
  Eigen::VectorXd w;
  double S = 0;
  Eigen::VectorXd nu;
  Eigen::VectorXd mu_perp_tilde;
  double xi = 0;
  Eigen::VectorXd y_tilde;
  DecompScalars sc;
  double coef_dy = 0, coef_y = 0, coef_mu = 0;  // bracketed coefficients (before / S)
};

struct DecomposeOptions {
  bool clean = false;              // use y in place of y_hat
  double s_perturbation = 0.0;     // verification sabotage hook: S <- S (1 + s_perturbation)
};

Eigen::VectorXd ridge_direct(const Dataset& ds, const Eigen::VectorXd& mu, double lambda_reg);
RidgeSolution decompose(const Dataset& ds, const Eigen::VectorXd& mu, const GramState& g,
                        const DecomposeOptions& opt = {});
RidgeSolution decompose(const Dataset& ds, const Eigen::VectorXd& mu, double lambda_reg,
                        const DecomposeOptions& opt = {});

Eigen::VectorXd mni_dual(const Dataset& ds, const Eigen::VectorXd& mu);
// noiseless three-term affine-span formula for the dual MNI
Eigen::VectorXd mni_dual_clean_formula(const Dataset& ds, const Eigen::VectorXd& mu);

struct MarginStats {
  double inner = 0;
  double sigma_norm = 0;
  double ratio = 0;
};

MarginStats margin_stats(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                         const Spectrum& spec);
double gaussian_error(double ratio);
// error against a fresh label flipped at rate eta
double noisy_gaussian_error(double ratio, double eta);

double smw_check(const Dataset& ds, std::size_t k, double lambda_reg);

// Degenerate-S tolerance: S <= 1e-12 (1 + |mu|^2 n / Lambda)
bool degenerate_S(double S, double mu_sq, int n, double Lambda);

// n-space evaluation engine for Monte-Carlo drivers. One instance per sampled
// trial; mu enters only through mu_hat (fixed direction) times a scale, and
// lambda only through the eigenvalues, so sweeps over either cost O(n^2).
class TrialSystem {
 public:
  TrialSystem(const Dataset& ds, const Spectrum& spec, const Eigen::VectorXd& mu_hat);

  struct Eval {
    bool valid = false;       // false when lambda is below the floor or S degenerate
    bool below_floor = false;
    bool degenerate = false;
    double S = 0, inner = 0, sigma_norm = 0, ratio = 0, train_residual = 0;
  };

  Eval evaluate(double scale, double lambda_reg, bool clean = false) const;
  double min_eig_QQt() const { return s_[0]; }

 private:
  Eigen::VectorXd s_;       // eigenvalues of QQ^T
  Eigen::MatrixXd Hu_;      // U^T Q Sigma Q^T U
  Eigen::VectorXd uy_, uyh_, unu_, ug_;  // U^T y, U^T y_hat, U^T Q mu_hat, U^T Q Sigma mu_hat
  double mu2_ = 0, muS2_ = 0, trace_ = 0;
  int n_ = 0;
};

}  // namespace bo
