#include "bo/events.hpp"

#include "bo/errors.hpp"
#include "bo/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace bo {

namespace {

Eigen::MatrixXd tail_block(const Dataset& ds, std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  if (kk > ds.Q.cols()) throw InvalidParams("k exceeds p");
  return ds.Q.rightCols(ds.Q.cols() - kk);
}

}  // namespace

double check_A_k(const Dataset& ds, const Spectrum& spec, std::size_t k, double lambda_reg) {
  if (k >= spec.size()) throw InvalidParams("k must be below p");
  Eigen::MatrixXd Ak = qqt(tail_block(ds, k));
  Ak.diagonal().array() += lambda_reg;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                 Ak, Eigen::EigenvaluesOnly)
                                 .eigenvalues();
  const double lo = ev[0], hi = ev[ev.size() - 1];
  if (!(lo > 1e-12 * std::max(1.0, hi))) throw SingularRegularization("A_k is not PD");
  const double L = lambda_tail(spec, k, lambda_reg);
  if (!(L > 0)) throw SingularRegularization("Lambda is not positive");
  return std::max(hi / L, L / lo);
}

EventReport check_B_k(const Dataset& ds, const Spectrum& spec, const Eigen::VectorXd& mu,
                      std::size_t k) {
  if (k >= spec.size()) throw InvalidParams("k must be below p");
  const auto kk = static_cast<Eigen::Index>(k);
  const double n = ds.n();
  EventReport r;
  r.k = k;

  if (k > 0) {
    const Eigen::MatrixXd Z0 = ds.Z.leftCols(kk);
    const Eigen::MatrixXd G = Z0.transpose() * Z0;
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly).eigenvalues();
    r.b1 = ev[ev.size() - 1] / n;
    if (ev[0] > 0) r.b1inv = n / ev[0];
    r.b4 = G.trace() / (n * double(k));
  }

  const Eigen::MatrixXd Qt = tail_block(ds, k);
  const Eigen::VectorXd lt = spec.values().tail(Qt.cols());
  const Eigen::VectorXd mt = mu.tail(Qt.cols());
  const double mt_sigma = mt.cwiseAbs2().dot(lt);
  if (mt_sigma > 0) r.b2 = (Qt * mt).squaredNorm() / (n * mt_sigma);

  const double tail_sq = spec.tail_sq_sum(k);
  const Eigen::MatrixXd H = qqt(Qt * lt.cwiseSqrt().asDiagonal());  // Q_t Sigma_t Q_t^T
  r.b3 = H.trace() / (n * tail_sq);
  const Eigen::VectorXd hv =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly).eigenvalues();
  const double lk1 = spec.at_or_zero(k);
  r.b5 = hv[hv.size() - 1] / (tail_sq + n * lk1 * lk1);

  for (const auto& v : {r.b1, r.b1inv, r.b2, r.b3, r.b4, r.b5})
    if (v) r.cB_measured = std::max(r.cB_measured, *v);
  return r;
}

std::string events_csv_header() {
  return "trial,k,lambda,L_measured,b1,b1inv,b2,b3,b4,b5,cB_measured";
}

std::string events_csv_row(std::size_t trial, const EventReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << trial << ',' << r.k << ',' << r.lambda_reg << ',' << r.L_measured;
  for (const auto& v : {r.b1, r.b1inv, r.b2, r.b3, r.b4, r.b5}) {
    os << ',';
    if (v) os << *v;
  }
  os << ',' << r.cB_measured;
  return os.str();
}

}  // namespace bo
