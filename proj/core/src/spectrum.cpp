#include "bo/spectrum.hpp"

#include "bo/errors.hpp"
#include "kahan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>

namespace bo {

Spectrum::Spectrum(std::vector<double> values) {
  if (values.empty()) throw InvalidSpectrum("empty spectrum");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InvalidSpectrum("eigenvalue " + std::to_string(i + 1) + " is not positive");
    if (i > 0 && values[i] > values[i - 1])
      throw InvalidSpectrum("eigenvalues increase at index " + std::to_string(i + 1));
  }
  const std::size_t p = values.size();
  values_ = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(p));
  tail_.assign(p + 1, 0.0);
  tail_sq_.assign(p + 1, 0.0);
  detail::KahanSum s, s2;
  for (std::size_t i = p; i-- > 0;) {
    s.add(values[i]);
    s2.add(values[i] * values[i]);
    tail_[i] = s.value();
    tail_sq_[i] = s2.value();
  }
}

Spectrum make_explicit(std::vector<double> values) { return Spectrum(std::move(values)); }

std::size_t bilevel_head(int n, double r) {
  // i <= n^r, guarded against n^r landing a hair below an integer
  return static_cast<std::size_t>(std::floor(std::pow(double(n), r) * (1 + 1e-12)));
}

Spectrum make_bilevel(int n, double s, double q, double r) {
  if (n < 2) throw InvalidParams("bilevel spectrum needs n >= 2");
  if (!(r >= 0 && r < 1 && s > 1)) throw InvalidParams("bilevel needs 0 <= r < 1 < s");
  if (!(q >= 0 && q < s - r)) throw InvalidParams("bilevel needs 0 <= q < s - r");
  const double nd = n;
  const double pd = std::round(std::pow(nd, s));
  if (pd > 2e8) throw InvalidParams("bilevel dimension too large");
  const auto p = static_cast<std::size_t>(pd);
  const std::size_t head = std::min(bilevel_head(n, r), p);
  const double hi = std::pow(nd, s - q - r);
  const double lo = (1 - std::pow(nd, -q)) / (1 - std::pow(nd, r - s));
  std::vector<double> v(p, lo);
  std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(head), hi);
  return Spectrum(std::move(v));
}

double lambda_tail(const Spectrum& spec, std::size_t k, double lambda_reg) {
  if (k > spec.size()) throw InvalidParams("k exceeds p");
  return lambda_reg + spec.tail_sum(k);
}

TailSummary tail_summary(const Spectrum& spec, std::size_t k, double lambda_reg, int n) {
  TailSummary t;
  t.k = k;
  t.lambda_reg = lambda_reg;
  t.Lambda = lambda_tail(spec, k, lambda_reg);
  t.tail_sq_sum = spec.tail_sq_sum(k);
  const double scale =
      std::max(n * spec.at_or_zero(k), std::sqrt(n * t.tail_sq_sum));
  t.margin = scale > 0 ? t.Lambda / scale : std::numeric_limits<double>::infinity();
  return t;
}

KStar k_star(const Spectrum& spec, double lambda_reg, int n, bool strict) {
  if (n < 1) throw InvalidParams("n must be positive");
  for (std::size_t kappa = 0; kappa < spec.size(); ++kappa) {
    const double L = lambda_reg + spec.tail_sum(kappa);
    const double rhs = n * spec[kappa];
    if (strict ? L > rhs : L >= rhs) return {kappa, L};
  }
  throw NoKStar("no kappa < p satisfies the effective-rank inequality");
}

namespace {

std::string binding_of(const std::vector<std::pair<std::string, double>>& slack) {
  auto it = std::min_element(slack.begin(), slack.end(),
                             [](auto& a, auto& b) { return a.second < b.second; });
  std::ostringstream os;
  os << it->first << "=" << std::setprecision(4) << it->second;
  return os.str();
}

CorollaryExample tail_balance(int n, int k, CorollaryParams P) {
  if (P.b <= 0) P.b = 4.0;
  if (k < 1) throw InvalidParams("tail-balance needs k >= 1");
  if (!(n > P.a) || !(k < n / P.a)) throw InvalidParams("tail-balance needs n > a and k < n/a");
  if (!(P.c1 > 1)) throw InvalidParams("tail-balance needs c1 > 1");
  const double bn = P.b * n;
  // tail e^{-j/(bn)}, j >= 1; keep m terms so that the omitted mass
  // r^{m+1}/(1-r) falls below truncation * Lambda(lambda)
  const double r = std::exp(-1.0 / bn);
  const double full = r / (1 - r);
  const double target = P.truncation * full / P.c1;
  const auto m = static_cast<std::size_t>(
      std::ceil(std::log(target * (1 - r)) / std::log(r)));
  std::vector<double> lam(k + m);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(k + m));
  for (int i = 0; i < k; ++i) {
    lam[i] = 2 * P.b;
    mu[i] = 4 * std::sqrt(P.b / k);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    lam[k + j - 1] = std::exp(-double(j) / bn);
    mu[static_cast<Eigen::Index>(k + j - 1)] = 4 * std::sqrt(P.b) * std::pow(2.0, -0.5 * double(j));
  }
  Spectrum spec(std::move(lam));
  const double tail = spec.tail_sum(static_cast<std::size_t>(k));
  const double reg = -((P.c1 - 1) / P.c1) * tail;
  const auto ts = tail_summary(spec, static_cast<std::size_t>(k), reg, n);
  std::string binding = binding_of({{"n/a", n / P.a},
                                    {"(n/a)/k", (n / P.a) / k},
                                    {"effective_rank_margin", ts.margin}});
  return {std::move(spec), std::move(mu), reg, P, std::move(binding)};
}

CorollaryExample geometry_destroy(int n, int k, CorollaryParams P) {
  if (P.b <= 0) P.b = 8.0;
  if (P.p == 0) P.p = static_cast<std::size_t>(20) * static_cast<std::size_t>(n);
  const double p = static_cast<double>(P.p);
  if (!(p > P.b * n)) throw InvalidParams("geometry-destroy needs p > b n");
  if (!(k >= P.b) || !(k < n / P.b)) throw InvalidParams("geometry-destroy needs b <= k < n/b");
  if (!(P.b > P.c) || !(P.c > 0)) throw InvalidParams("geometry-destroy needs b > c > 0");
  if (!(P.c1 > 1)) throw InvalidParams("geometry-destroy needs c1 > 1");
  const double kd = k;
  std::vector<double> lam(P.p);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P.p));
  const double m = P.b * std::log(kd) / std::pow(kd, 5) * (kd / n + n / p);
  for (int i = 1; i <= k; ++i) {
    lam[i - 1] = std::pow(kd, -4.0 * i / kd);
    mu[i - 1] = m;
  }
  std::fill(lam.begin() + k, lam.end(), P.c * n / (p * std::pow(kd, 4)));
  Spectrum spec(std::move(lam));
  const double tail = spec.tail_sum(static_cast<std::size_t>(k));
  const double reg = -((P.c1 - 1) / P.c1) * tail;
  const auto ts = tail_summary(spec, static_cast<std::size_t>(k), reg, n);
  std::string binding = binding_of({{"p/(bn)", p / (P.b * n)},
                                    {"k/b", kd / P.b},
                                    {"(n/b)/k", (n / P.b) / kd},
                                    {"b/c", P.b / P.c},
                                    {"effective_rank_margin", ts.margin}});
  return {std::move(spec), std::move(mu), reg, P, std::move(binding)};
}

}  // namespace

CorollaryExample make_corollary_example(CorollaryKind kind, int n, int k, CorollaryParams params) {
  return kind == CorollaryKind::TailBalance ? tail_balance(n, k, params)
                                            : geometry_destroy(n, k, params);
}

CorollaryKind corollary_kind_from(const std::string& name) {
  if (name == "tail-balance") return CorollaryKind::TailBalance;
  if (name == "geometry-destroy") return CorollaryKind::GeometryDestroy;
  throw InvalidParams("unknown corollary example '" + name + "'");
}

Spectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open spectrum file " + path);
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x;
    if (!(ls >> x)) throw InvalidSpectrum("unparsable line in " + path + ": " + line);
    v.push_back(x);
  }
  return Spectrum(std::move(v));
}

void save_spectrum(const Spectrum& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidParams("cannot write " + path);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < spec.size(); ++i) out << spec[i] << '\n';
}

}  // namespace bo
