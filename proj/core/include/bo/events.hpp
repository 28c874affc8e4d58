#pragma once

#include "bo/model.hpp"
#include "bo/spectrum.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace bo {

// Not-applicable conditions stay empty so a max over them skips them.
struct EventReport {
  std::size_t k = 0;
  double lambda_reg = 0;
  double L_measured = 0;
  std::optional<double> b1, b1inv, b2, b3, b4, b5;
  double cB_measured = 0;
};

// Smallest L with Lambda/L <= mu_n(A_k) and mu_1(A_k) <= L Lambda.
double check_A_k(const Dataset& ds, const Spectrum& spec, std::size_t k, double lambda_reg);

// Implied constants of the five B_k conditions. L_measured is left at 0.
EventReport check_B_k(const Dataset& ds, const Spectrum& spec, const Eigen::VectorXd& mu,
                      std::size_t k);

std::string events_csv_header();
std::string events_csv_row(std::size_t trial, const EventReport& r);

}  // namespace bo
