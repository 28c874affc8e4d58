#include "bo/bounds.hpp"

#include "bo/errors.hpp"
#include "kahan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bo {

using detail::KahanSum;

double QuantitySet::diamond() const { return std::sqrt(Diamond2); }

double QuantitySet::tight_ratio() const {
  return N / (std::sqrt(V) + std::sqrt(double(n)) * diamond());
}

double QuantitySet::upper_ratio() const { return N / std::sqrt(V + n * Diamond2); }

double sigma_eta(double eta) {
  if (eta == 0.0) return 0.0;  // continuous limit
  return 1.0 / std::sqrt(std::log((3.0 + 1.0 / eta) / 2.0));
}

QuantitySet quantities(const Spectrum& spec, const Eigen::VectorXd& mu, int n, std::size_t k,
                       double lambda_reg, double eta) {
  const std::size_t p = spec.size();
  if (static_cast<std::size_t>(mu.size()) != p) throw InvalidParams("mu length differs from p");
  if (k > p) throw InvalidParams("k exceeds p");
  if (n < 1) throw InvalidParams("n must be positive");
  QuantitySet q;
  q.k = k;
  q.n = n;
  q.lambda_reg = lambda_reg;
  q.Lambda = lambda_reg + spec.tail_sum(k);
  if (!(q.Lambda > 0)) throw InvalidParams("Lambda = lambda + sum_{i>k} lambda_i must be positive");
  const double L = q.Lambda, nd = n;

  KahanSum v_head, b_head, m_head;
  for (std::size_t i = 0; i < k; ++i) {
    const double li = spec[i], mi2 = mu[static_cast<Eigen::Index>(i)] * mu[static_cast<Eigen::Index>(i)];
    const double h = L / (nd * li) + 1.0;
    v_head.add(1.0 / (h * h));
    b_head.add(mi2 / li / (h * h));
    m_head.add(mi2 / li / h);
  }
  KahanSum b_tail, m_tail;
  for (std::size_t i = k; i < p; ++i) {
    const double mi2 = mu[static_cast<Eigen::Index>(i)] * mu[static_cast<Eigen::Index>(i)];
    b_tail.add(spec[i] * mi2);
    m_tail.add(mi2);
  }
  const double tail_sq = spec.tail_sq_sum(k);
  const double lk1 = spec.at_or_zero(k);

  q.V = v_head.value() / nd + nd * tail_sq / (L * L);
  q.DeltaV = std::min(1.0 / nd, nd * spec[0] * spec[0] / (L * L)) +
             (nd * lk1 * lk1 + tail_sq) / (L * L);
  q.B = (L * L) / (nd * nd) * b_head.value() + b_tail.value();
  q.Diamond2 = nd * q.B / (L * L);
  q.M = (L / nd) * m_head.value() + m_tail.value();
  q.N = nd * q.M / L;
  q.sigma_eta = sigma_eta(eta);
  q.precondition_ok = k <= static_cast<std::size_t>(n) &&
                      L > std::max(nd * lk1, std::sqrt(nd * tail_sq));
  return q;
}

BoundEval lower_bound(const QuantitySet& qs, double t) {
  if (!(t >= 0)) throw InvalidParams("t must be nonnegative");
  BoundEval b;
  b.t = t;
  const double d = qs.diamond(), rn = std::sqrt(double(qs.n));
  b.sqrtV = std::sqrt(qs.V + t * t * qs.DeltaV);
  b.diamond_term = d * rn;
  b.noise_term = qs.N * qs.sigma_eta * b.sqrtV;
  b.numerator = qs.N - t * d;
  b.denominator = b.sqrtV + b.noise_term + b.diamond_term;
  if (b.numerator > 0 && b.denominator > 0) b.ratio = b.numerator / b.denominator;
  b.t_in_domain = t < rn;
  return b;
}

KStarSet quantities_kstar(const Spectrum& spec, const Eigen::VectorXd& mu, int n,
                          double lambda_reg, bool strict) {
  const KStar ks = k_star(spec, lambda_reg, n, strict);
  KStarSet s;
  s.k = ks.k;
  s.Lambda = ks.Lambda;
  const double nd = n, L = ks.Lambda;
  KahanSum head, tail_s, tail_e;
  for (std::size_t i = 0; i < ks.k; ++i) {
    const double m = mu[static_cast<Eigen::Index>(i)];
    head.add(m * m / spec[i]);
  }
  for (std::size_t i = ks.k; i < spec.size(); ++i) {
    const double m = mu[static_cast<Eigen::Index>(i)];
    tail_s.add(spec[i] * m * m);
    tail_e.add(m * m);
  }
  s.V = double(ks.k) / nd + nd * spec.tail_sq_sum(ks.k) / (L * L);
  s.Diamond2 = head.value() / nd + nd * tail_s.value() / (L * L);
  s.N = head.value() + nd * tail_e.value() / L;
  return s;
}

AltSet quantities_alt_at(const Spectrum& spec, const Eigen::VectorXd& mu, int n, double Lambda) {
  if (!(Lambda > 0)) throw InvalidParams("Lambda must be positive");
  AltSet a;
  a.Lambda = Lambda;
  const double nd = n, t = Lambda / nd;
  KahanSum N, V, D;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double li = spec[i], m2 = mu[static_cast<Eigen::Index>(i)] * mu[static_cast<Eigen::Index>(i)];
    const double den = li + t;
    N.add(m2 / den);
    V.add(li * li / nd / (den * den));
    D.add(li * m2 / nd / (den * den));
  }
  a.N = N.value();
  a.V = V.value();
  a.Diamond2 = D.value();
  return a;
}

AltSet quantities_alt(const Spectrum& spec, const Eigen::VectorXd& mu, int n, std::size_t k,
                      double lambda_reg) {
  return quantities_alt_at(spec, mu, n, lambda_tail(spec, k, lambda_reg));
}

namespace {

double sigma_norm2(const Spectrum& spec, const Eigen::VectorXd& mu) {
  return mu.cwiseAbs2().dot(spec.values());
}

}  // namespace

double cgb_bound(const Spectrum& spec, const Eigen::VectorXd& mu, int n) {
  const double m2 = mu.squaredNorm();
  const double den = n * sigma_norm2(spec, mu) + spec.tail_sq_sum(0) + n * spec[0] * spec[0];
  return std::sqrt(n * m2 * m2 / den);
}

double cgb_comparison_floor(const Spectrum& spec, const Eigen::VectorXd& mu, int n) {
  const double nd = n;
  return 0.25 * nd * mu.squaredNorm() /
         (nd * std::sqrt(sigma_norm2(spec, mu)) + std::sqrt(nd * spec.tail_sq_sum(0)) +
          nd * spec[0]);
}

WangBound wang_bounds(const Spectrum& spec, const Eigen::VectorXd& mu, int n, double lambda_reg,
                      WangVariant variant, std::size_t j) {
  WangBound w;
  const double nd = n, m2 = mu.squaredNorm(), ms = std::sqrt(sigma_norm2(spec, mu));
  if (variant == WangVariant::Balanced) {
    const double L = lambda_tail(spec, 0, lambda_reg);
    if (!(L > 0)) throw InvalidParams("Lambda must be positive");
    w.numerator = m2 - (nd / L * ms * ms + ms);
    w.denominator = std::max(1.0, nd / L * ms) * std::sqrt(spec.tail_sq_sum(0)) + ms;
  } else {
    if (j < 2 || j > spec.size()) throw InvalidParams("bi-level variant needs 1 < j <= p");
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (i != static_cast<Eigen::Index>(j - 1) && mu[i] != 0.0)
        throw InvalidParams("bi-level variant needs mu = mu_j e_j");
    const double L = lambda_tail(spec, 1, lambda_reg);
    if (!(L > 0)) throw InvalidParams("Lambda must be positive");
    const double l1 = spec[0], lj = spec[j - 1];
    w.A = l1 * (L + nd * ms) / (nd * l1 + L);
    const double rest = spec.tail_sq_sum(1) - lj * lj;
    w.B = (1.0 + nd / L * ms) * std::sqrt(std::max(rest, 0.0));
    w.numerator = m2 * (1.0 - nd / L * lj) - ms;
    w.denominator = w.A + w.B + lj + ms;
    w.comparison_floor = m2 / (6.0 * w.denominator);
  }
  w.vacuous = !(w.numerator > 0);
  w.value = w.numerator / w.denominator;
  return w;
}

ChatterjiArgs chatterji_scaled(double mu_sq_norm, double p, int n, double kappa) {
  if (!(kappa > 0 && kappa <= 1)) throw InvalidParams("kappa must lie in (0, 1]");
  return {mu_sq_norm / std::sqrt(p), mu_sq_norm * std::sqrt(n * kappa) / std::sqrt(p)};
}

double muthukumar_ratio(int n, double q, double r, double s) {
  const Spectrum spec = make_bilevel(n, s, q, r);
  const std::size_t k = std::min(bilevel_head(n, r), spec.size() - 1);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.size()));
  mu[0] = std::sqrt(2.0 * spec[0] / M_PI);
  return quantities(spec, mu, n, k, 0.0, 0.0).tight_ratio();
}

std::string bounds_csv_header() {
  return "k,lambda,Lambda,V,DeltaV,B,Diamond2,M,N,sigma_eta,t,numerator,denominator,ratio,"
         "sqrtV,diamond_term,noise_term,precondition_ok";
}

std::string bounds_csv_row(const QuantitySet& q, const BoundEval& b) {
  std::ostringstream os;
  os.precision(17);
  os << q.k << ',' << q.lambda_reg << ',' << q.Lambda << ',' << q.V << ',' << q.DeltaV << ','
     << q.B << ',' << q.Diamond2 << ',' << q.M << ',' << q.N << ',' << q.sigma_eta << ','
     << b.t << ',' << b.numerator << ',' << b.denominator << ',';
  if (b.ratio) os << *b.ratio;
  os << ',' << b.sqrtV << ',' << b.diamond_term << ',' << b.noise_term << ','
     << (q.precondition_ok ? 1 : 0);
  return os.str();
}

}  // namespace bo
