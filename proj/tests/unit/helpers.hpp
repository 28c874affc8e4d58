#pragma once

#include "bo/model.hpp"
#include "bo/spectrum.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace bo::test {

inline Eigen::VectorXd basis(std::size_t p, std::size_t j) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  v[static_cast<Eigen::Index>(j)] = 1.0;
  return v;
}

inline Spectrum iso(std::size_t p) { return Spectrum(std::vector<double>(p, 1.0)); }

inline Spectrum spiked(std::size_t p, double top) {
  std::vector<double> v(p, 1.0);
  v[0] = top;
  return Spectrum(v);
}

inline Spectrum decaying(std::size_t p, double a) {
  std::vector<double> v(p);
  for (std::size_t i = 0; i < p; ++i) v[i] = std::pow(double(i + 1), -a);
  return Spectrum(v);
}

inline ProblemSpec problem(Spectrum s, Eigen::VectorXd mu, int n, double eta = 0.0,
                           double lambda = 0.0) {
  return ProblemSpec{std::move(s), std::move(mu), n, eta, lambda, Law::Gaussian};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("bo_unit_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace bo::test
