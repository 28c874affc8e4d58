#include "bo/solver.hpp"

#include "bo/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>

namespace bo {

namespace {

std::string floor_message(double lambda, double min_eig) {
  std::ostringstream os;
  os << "lambda=" << lambda << " is below the analytic-continuation floor "
     << lambda_floor(min_eig) << " (mu_n(QQ^T)=" << min_eig << ")";
  return os.str();
}

}  // namespace

Eigen::MatrixXd qqt(const Eigen::MatrixXd& Q) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Q.rows(), Q.rows());
  G.selfadjointView<Eigen::Lower>().rankUpdate(Q);
  return G.selfadjointView<Eigen::Lower>();
}

GramState::GramState(const Eigen::MatrixXd& G, double lambda_reg) : lambda_(lambda_reg) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw SingularRegularization("eigendecomposition failed");
  U_ = es.eigenvectors();
  evals_ = es.eigenvalues();
  check();
}

void GramState::check() const {
  if (lambda_ < lambda_floor(evals_[0]) || !(evals_[0] + lambda_ > 0))
    throw SingularRegularization(floor_message(lambda_, evals_[0]));
}

GramState GramState::with_lambda(double lambda_reg) const {
  GramState g;
  g.U_ = U_;
  g.evals_ = evals_;
  g.lambda_ = lambda_reg;
  g.check();
  return g;
}

Eigen::VectorXd GramState::solve(const Eigen::VectorXd& v) const {
  Eigen::VectorXd t = U_.transpose() * v;
  t.array() /= (evals_.array() + lambda_);
  return U_ * t;
}

Eigen::MatrixXd GramState::solve(const Eigen::MatrixXd& M) const {
  Eigen::MatrixXd t = U_.transpose() * M;
  t = (evals_.array() + lambda_).inverse().matrix().asDiagonal() * t;
  return U_ * t;
}

Eigen::MatrixXd GramState::A() const {
  return U_ * (evals_.array() + lambda_).matrix().asDiagonal() * U_.transpose();
}

GramState gram(const Dataset& ds, double lambda_reg) { return GramState(qqt(ds.Q), lambda_reg); }

Eigen::VectorXd ridge_direct(const Dataset& ds, const Eigen::VectorXd& mu, double lambda_reg) {
  const Eigen::MatrixXd X = ds.X(mu);
  Eigen::MatrixXd K = X * X.transpose();
  K.diagonal().array() += lambda_reg;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  if (!(lu.rcond() > 1e-14))
    throw SingularRegularization("lambda I + XX^T is numerically singular");
  return X.transpose() * lu.solve(ds.y_hat);
}

RidgeSolution decompose(const Dataset& ds, const Eigen::VectorXd& mu, const GramState& g,
                        const DecomposeOptions& opt) {
  const Eigen::VectorXd& y = ds.y;
  const Eigen::VectorXd yh = opt.clean ? ds.y : ds.y_hat;
  const Eigen::VectorXd dy = yh - y;

  RidgeSolution r;
  r.nu = ds.Q * mu;
  const Eigen::VectorXd Ay = g.solve(y);
  const Eigen::VectorXd Ady = g.solve(dy);
  const Eigen::VectorXd Anu = g.solve(r.nu);

  auto& s = r.sc;
  s.yAy = y.dot(Ay);
  s.dyAy = dy.dot(Ay);
  s.yAyh = s.yAy + s.dyAy;
  s.nuAy = r.nu.dot(Ay);
  s.nuAdy = r.nu.dot(Ady);
  s.nuAyh = s.nuAy + s.nuAdy;
  r.mu_perp_tilde = mu - ds.Q.transpose() * Anu;
  s.mu_mu_perp = mu.squaredNorm() - r.nu.dot(Anu);

  const double one_nu = 1.0 + s.nuAy;
  r.S = one_nu * one_nu + s.mu_mu_perp * s.yAy;
  r.coef_dy = one_nu * one_nu + s.yAy * s.mu_mu_perp;
  r.coef_y = one_nu * (1.0 - s.nuAdy) - s.dyAy * s.mu_mu_perp;
  r.coef_mu = s.yAy + one_nu * s.dyAy - s.yAy * s.nuAdy;

  // tr(Sigma) estimated by |Q|_F^2 / n; the spectrum is not needed otherwise
  const double Lambda = g.lambda_reg() + ds.Q.squaredNorm() / std::max(1, ds.n());
  if (degenerate_S(r.S, mu.squaredNorm(), ds.n(), Lambda))
    throw DegenerateS("S=" + std::to_string(r.S) + " is not positive");
  const double S = r.S * (1.0 + opt.s_perturbation);

  // S w = Q^T A^{-1} (c_dy dy + c_y y) + c_mu mu~perp
  const Eigen::VectorXd a = r.coef_dy * Ady + r.coef_y * Ay;
  r.w = (ds.Q.transpose() * a + r.coef_mu * r.mu_perp_tilde) / S;

  r.xi = s.yAyh / s.yAy;
  r.y_tilde = yh - r.xi * y;
  return r;
}

RidgeSolution decompose(const Dataset& ds, const Eigen::VectorXd& mu, double lambda_reg,
                        const DecomposeOptions& opt) {
  return decompose(ds, mu, gram(ds, lambda_reg), opt);
}

Eigen::VectorXd mni_dual(const Dataset& ds, const Eigen::VectorXd& mu) {
  const Eigen::VectorXd w = decompose(ds, mu, 0.0).w;
  const double nn = w.squaredNorm();
  if (!(nn > 0)) throw ZeroSolution("w_MNI = 0");
  return w / nn;
}

Eigen::VectorXd mni_dual_clean_formula(const Dataset& ds, const Eigen::VectorXd& mu) {
  const GramState g = gram(ds, 0.0);
  const Eigen::VectorXd nu = ds.Q * mu;
  const Eigen::VectorXd Ay = g.solve(ds.y);
  const double yAy = ds.y.dot(Ay);
  const Eigen::VectorXd QAy = ds.Q.transpose() * Ay;
  const Eigen::VectorXd mu_perp = mu - ds.Q.transpose() * g.solve(nu);
  return QAy / yAy + mu_perp + (nu.dot(Ay) / yAy) * QAy;
}

MarginStats margin_stats(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                         const Spectrum& spec) {
  MarginStats m;
  m.inner = mu.dot(w);
  m.sigma_norm = std::sqrt(w.cwiseAbs2().dot(spec.values()));
  if (!(m.sigma_norm > 0)) throw ZeroSolution("|w|_Sigma = 0");
  m.ratio = m.inner / m.sigma_norm;
  return m;
}

double gaussian_error(double ratio) { return 0.5 * std::erfc(ratio / std::sqrt(2.0)); }

double noisy_gaussian_error(double ratio, double eta) {
  return eta + (1.0 - 2.0 * eta) * gaussian_error(ratio);
}

bool degenerate_S(double S, double mu_sq, int n, double Lambda) {
  const double scale = Lambda > 0 ? mu_sq * n / Lambda : 0.0;
  return S <= 1e-12 * (1.0 + scale);
}

namespace {

// The identities are checked against dense inverses; extended precision keeps
// the oracle's own rounding (about cond(A_k) eps) well below the tolerance.
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

double rel_residual(const MatL& lhs, const MatL& rhs) {
  const long double denom =
      std::max({lhs.norm(), rhs.norm(), std::numeric_limits<long double>::min()});
  return static_cast<double>((lhs - rhs).norm() / denom);
}

}  // namespace

double smw_check(const Dataset& ds, std::size_t k, double lambda_reg) {
  const Eigen::Index n = ds.n();
  const auto kk = static_cast<Eigen::Index>(k);
  if (kk > ds.Q.cols()) throw InvalidParams("k exceeds p");
  const MatL Q = ds.Q.cast<long double>();
  const MatL Qt = Q.rightCols(Q.cols() - kk);
  MatL Ak = Qt * Qt.transpose();
  Ak.diagonal().array() += lambda_reg;
  // a Cholesky pivot can survive at rounding level when rank(Q_k) < n, so test the spectrum
  const auto ev =
      Eigen::SelfAdjointEigenSolver<MatL>(Ak, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(ev[0] > 1e-12L * std::abs(ev[n - 1]))) throw SingularRegularization("A_k is not PD");
  const MatL I = MatL::Identity(n, n);
  const MatL Ak_inv = Ak.llt().solve(I);
  MatL A = Q * Q.transpose();
  A.diagonal().array() += lambda_reg;
  Eigen::LLT<MatL> llt(A);
  if (llt.info() != Eigen::Success) throw SingularRegularization("A is not PD");
  const MatL A_inv = llt.solve(I);
  if (kk == 0) return rel_residual(A_inv, Ak_inv);

  const MatL Q0 = Q.leftCols(kk);
  const MatL AkQ0 = Ak_inv * Q0;
  MatL inner = Q0.transpose() * AkQ0;
  inner.diagonal().array() += 1.0L;
  const MatL inner_inv = inner.llt().solve(MatL::Identity(kk, kk));

  const double r1 = rel_residual(A_inv, Ak_inv - AkQ0 * inner_inv * AkQ0.transpose());
  const double r2 = rel_residual(A_inv * Q0, AkQ0 * inner_inv);
  const MatL lhs3 = MatL::Identity(kk, kk) - Q0.transpose() * A_inv * Q0;
  const double r3 = rel_residual(lhs3, inner_inv);
  return std::max({r1, r2, r3});
}

TrialSystem::TrialSystem(const Dataset& ds, const Spectrum& spec, const Eigen::VectorXd& mu_hat)
    : n_(ds.n()) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qqt(ds.Q));
  if (es.info() != Eigen::Success) throw SingularRegularization("eigendecomposition failed");
  s_ = es.eigenvalues();
  const Eigen::MatrixXd& U = es.eigenvectors();
  const Eigen::VectorXd sq = spec.values().cwiseSqrt();
  const Eigen::MatrixXd QS = ds.Q * sq.asDiagonal();  // Q Sigma^{1/2}
  const Eigen::MatrixXd H = qqt(QS);
  Hu_ = U.transpose() * H * U;
  uy_ = U.transpose() * ds.y;
  uyh_ = U.transpose() * ds.y_hat;
  unu_ = U.transpose() * (ds.Q * mu_hat);
  ug_ = U.transpose() * (QS * sq.cwiseProduct(mu_hat));
  mu2_ = mu_hat.squaredNorm();
  muS2_ = mu_hat.cwiseAbs2().dot(spec.values());
  trace_ = spec.tail_sum(0);
}

TrialSystem::Eval TrialSystem::evaluate(double m, double lambda_reg, bool clean) const {
  Eval e;
  if (lambda_reg < lambda_floor(s_[0]) || !(s_[0] + lambda_reg > 0)) {
    e.below_floor = true;
    return e;
  }
  const Eigen::ArrayXd d = (s_.array() + lambda_reg).inverse();
  const Eigen::ArrayXd uy = uy_.array();
  const Eigen::ArrayXd udy = clean ? Eigen::ArrayXd(Eigen::ArrayXd::Zero(n_)) : Eigen::ArrayXd((uyh_ - uy_).array());
  const Eigen::ArrayXd unu = m * unu_.array();

  const double yAy = (d * uy * uy).sum();
  const double dyAy = (d * udy * uy).sum();
  const double nuAy = (d * unu * uy).sum();
  const double nuAdy = (d * unu * udy).sum();
  const double mm = m * m * mu2_ - (d * unu * unu).sum();
  const double one_nu = 1.0 + nuAy;
  const double S = one_nu * one_nu + mm * yAy;
  e.S = S;
  if (degenerate_S(S, m * m * mu2_, n_, lambda_reg + trace_)) {
    e.degenerate = true;
    return e;
  }
  const double c_dy = S;
  const double c_y = one_nu * (1.0 - nuAdy) - dyAy * mm;
  const double c_mu = yAy + one_nu * dyAy - yAy * nuAdy;

  // S w = Q^T a + c_mu mu, a = A^{-1}(c_dy dy + c_y y - c_mu nu), kept in the eigenbasis
  const Eigen::VectorXd a = (d * (c_dy * udy + c_y * uy - c_mu * unu)).matrix();
  const double Sinner = unu.matrix().dot(a) + c_mu * m * m * mu2_;
  const double Snorm2 = a.dot(Hu_ * a) + 2.0 * c_mu * m * ug_.dot(a) + c_mu * c_mu * m * m * muS2_;
  e.inner = Sinner / S;
  e.sigma_norm = std::sqrt(std::max(Snorm2, 0.0)) / S;
  e.ratio = e.sigma_norm > 0 ? e.inner / e.sigma_norm : 0.0;

  const Eigen::ArrayXd target = clean ? uy : uyh_.array();
  const Eigen::ArrayXd Xw = uy * e.inner + (s_.array() * a.array() + c_mu * unu) / S;
  e.train_residual = (Xw - target).matrix().norm() / target.matrix().norm();
  e.valid = e.sigma_norm > 0;
  return e;
}

}  // namespace bo
