#pragma once

#include "bo/spectrum.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace bo {

enum class Law { Gaussian, Rademacher };

Law law_from(const std::string& name);
const char* to_string(Law law);

struct ProblemSpec {
  Spectrum spectrum;
  Eigen::VectorXd mu;
  int n = 0;
  double eta = 0.0;
  double lambda_reg = 0.0;
  Law law = Law::Gaussian;

  std::size_t p() const { return spectrum.size(); }
  void validate() const;  // throws InvalidParams
};

struct Dataset {
  Eigen::MatrixXd Z;  // n x p
  Eigen::MatrixXd Q;  // Z Sigma^{1/2}
  Eigen::VectorXd y;
  Eigen::VectorXd y_hat;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  int n() const { return static_cast<int>(Q.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(Q.cols()); }
  Eigen::VectorXd delta_y() const { return y_hat - y; }
  // X = y mu^T + Q
  Eigen::MatrixXd X(const Eigen::VectorXd& mu) const;
};

Dataset sample_dataset(const ProblemSpec& problem, std::uint64_t seed, std::uint64_t trial = 0);
Eigen::VectorXd flip_labels(const Eigen::VectorXd& y, double eta, std::uint64_t seed,
                            std::uint64_t trial = 0);

struct TestPoint {
  Eigen::VectorXd x;
  double y = 0;
  double y_hat = 0;
};

// index selects the draw inside the (seed, trial) test stream
TestPoint test_point(const ProblemSpec& problem, std::uint64_t seed, std::uint64_t index,
                     bool zero_noise = false);

// Fraction of `draws` fresh points misclassified by sign(w^T x) against the clean label.
// Streams the draws; never materialises more than one x.
double mc_test_error(const ProblemSpec& problem, const Eigen::VectorXd& w, std::uint64_t seed,
                     std::size_t draws);

// Raw little-endian dump: Z.f64, y.i8, yhat.i8 (+ w.f64) and meta.json.
void dump_dataset(const Dataset& ds, const ProblemSpec& problem, const std::string& dir,
                  const std::string& spectrum_ref, const Eigen::VectorXd* w = nullptr);
Dataset load_dataset(const ProblemSpec& problem, const std::string& dir);

}  // namespace bo
