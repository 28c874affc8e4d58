#include "bo/model.hpp"

#include "bo/errors.hpp"
#include "bo/rng.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace bo {

static_assert(std::endian::native == std::endian::little, "dump format assumes little-endian host");

Law law_from(const std::string& name) {
  if (name == "gaussian") return Law::Gaussian;
  if (name == "rademacher") return Law::Rademacher;
  throw InvalidParams("unknown covariate law '" + name + "'");
}

const char* to_string(Law law) { return law == Law::Gaussian ? "gaussian" : "rademacher"; }

void ProblemSpec::validate() const {
  if (static_cast<std::size_t>(mu.size()) != spectrum.size())
    throw InvalidParams("mu has length " + std::to_string(mu.size()) + ", spectrum has " +
                        std::to_string(spectrum.size()));
  if (n < 1) throw InvalidParams("n must be positive");
  if (!(eta >= 0.0 && eta < 0.5)) throw InvalidParams("eta must lie in [0, 1/2)");
  if (!(spectrum.size() > static_cast<std::size_t>(n)))
    throw InvalidParams("need p > n (overparameterized regime)");
}

Eigen::MatrixXd Dataset::X(const Eigen::VectorXd& mu) const {
  Eigen::MatrixXd X = Q;
  X.noalias() += y * mu.transpose();
  return X;
}

Eigen::VectorXd flip_labels(const Eigen::VectorXd& y, double eta, std::uint64_t seed,
                            std::uint64_t trial) {
  if (!(eta >= 0.0 && eta < 0.5)) throw InvalidParams("eta must lie in [0, 1/2)");
  Eigen::VectorXd out = y;
  if (eta == 0.0) return out;
  auto eng = make_engine(seed, trial, Stream::Flips);
  boost::random::bernoulli_distribution<double> flip(eta);
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (flip(eng)) out[i] = -out[i];
  return out;
}

namespace {

template <class Eng>
void fill_law(Eigen::Ref<Eigen::MatrixXd> Z, Law law, Eng& eng) {
  // column-major fill order is part of the reproducibility contract
  if (law == Law::Gaussian) {
    boost::random::normal_distribution<double> g;
    double* d = Z.data();
    for (Eigen::Index i = 0, m = Z.size(); i < m; ++i) d[i] = g(eng);
  } else {
    boost::random::bernoulli_distribution<double> b(0.5);
    double* d = Z.data();
    for (Eigen::Index i = 0, m = Z.size(); i < m; ++i) d[i] = b(eng) ? 1.0 : -1.0;
  }
}

}  // namespace

Dataset sample_dataset(const ProblemSpec& problem, std::uint64_t seed, std::uint64_t trial) {
  problem.validate();
  const Eigen::Index n = problem.n, p = static_cast<Eigen::Index>(problem.p());
  Dataset ds;
  ds.seed = seed;
  ds.trial = trial;
  ds.Z.resize(n, p);
  auto ez = make_engine(seed, trial, Stream::Z);
  fill_law(ds.Z, problem.law, ez);
  ds.Q = ds.Z * problem.spectrum.values().cwiseSqrt().asDiagonal();
  ds.y.resize(n);
  auto ey = make_engine(seed, trial, Stream::Y);
  boost::random::bernoulli_distribution<double> coin(0.5);
  for (Eigen::Index i = 0; i < n; ++i) ds.y[i] = coin(ey) ? 1.0 : -1.0;
  ds.y_hat = flip_labels(ds.y, problem.eta, seed, trial);
  return ds;
}

TestPoint test_point(const ProblemSpec& problem, std::uint64_t seed, std::uint64_t index,
                     bool zero_noise) {
  auto eng = make_engine(seed, index, Stream::Test);
  boost::random::bernoulli_distribution<double> coin(0.5);
  TestPoint t;
  t.y = coin(eng) ? 1.0 : -1.0;
  boost::random::bernoulli_distribution<double> flip(problem.eta);
  t.y_hat = (problem.eta > 0 && flip(eng)) ? -t.y : t.y;
  const Eigen::Index p = static_cast<Eigen::Index>(problem.p());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
  if (!zero_noise) fill_law(z, problem.law, eng);
  t.x = t.y * problem.mu + problem.spectrum.values().cwiseSqrt().cwiseProduct(z);
  return t;
}

double mc_test_error(const ProblemSpec& problem, const Eigen::VectorXd& w, std::uint64_t seed,
                     std::size_t draws) {
  if (draws == 0) return 0.0;
  auto eng = make_engine(seed, 0, Stream::Test, 0x7e57);
  boost::random::bernoulli_distribution<double> coin(0.5);
  const Eigen::VectorXd sw = problem.spectrum.values().cwiseSqrt().cwiseProduct(w);
  const double mw = problem.mu.dot(w);
  Eigen::VectorXd z(w.size());
  std::size_t wrong = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    const double y = coin(eng) ? 1.0 : -1.0;
    fill_law(z, problem.law, eng);
    // w^T x = y mu^T w + (Sigma^{1/2} w)^T z
    const double score = y * mw + sw.dot(z);
    if (score * y <= 0) ++wrong;
  }
  return double(wrong) / double(draws);
}

namespace {

void write_raw(const std::filesystem::path& path, const char* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParams("cannot write " + path.string());
  out.write(data, static_cast<std::streamsize>(bytes));
}

std::vector<char> read_raw(const std::filesystem::path& path, std::size_t bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParams("cannot read " + path.string());
  std::vector<char> buf(bytes);
  in.read(buf.data(), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes)
    throw InvalidParams("short file " + path.string());
  return buf;
}

void write_labels(const std::filesystem::path& path, const Eigen::VectorXd& v) {
  std::vector<std::int8_t> b(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) b[static_cast<std::size_t>(i)] = v[i] > 0 ? 1 : -1;
  write_raw(path, reinterpret_cast<const char*>(b.data()), b.size());
}

Eigen::VectorXd read_labels(const std::filesystem::path& path, int n) {
  auto raw = read_raw(path, static_cast<std::size_t>(n));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<std::int8_t>(raw[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

void dump_dataset(const Dataset& ds, const ProblemSpec& problem, const std::string& dir,
                  const std::string& spectrum_ref, const Eigen::VectorXd* w) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);
  // Z is stored row-major (one data point after another)
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Zr = ds.Z;
  write_raw(d / "Z.f64", reinterpret_cast<const char*>(Zr.data()),
            sizeof(double) * static_cast<std::size_t>(Zr.size()));
  write_labels(d / "y.i8", ds.y);
  write_labels(d / "yhat.i8", ds.y_hat);
  nlohmann::json meta = {{"n", ds.n()},
                         {"p", ds.p()},
                         {"law", to_string(problem.law)},
                         {"seed", ds.seed},
                         {"trial", ds.trial},
                         {"eta", problem.eta},
                         {"lambda", problem.lambda_reg},
                         {"spectrum", spectrum_ref},
                         {"layout", "Z row-major float64 little-endian; labels int8"}};
  if (w) {
    write_raw(d / "w.f64", reinterpret_cast<const char*>(w->data()),
              sizeof(double) * static_cast<std::size_t>(w->size()));
    meta["w"] = "w.f64";
  }
  std::ofstream(d / "meta.json") << meta.dump(2) << '\n';
}

Dataset load_dataset(const ProblemSpec& problem, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  std::ifstream mf(d / "meta.json");
  if (!mf) throw InvalidParams("missing meta.json in " + dir);
  auto meta = nlohmann::json::parse(mf);
  const int n = meta.at("n").get<int>();
  const auto p = meta.at("p").get<std::size_t>();
  if (p != problem.p()) throw InvalidParams("dump dimension does not match the problem");
  Dataset ds;
  ds.seed = meta.at("seed").get<std::uint64_t>();
  ds.trial = meta.value("trial", std::uint64_t{0});
  auto raw = read_raw(d / "Z.f64", sizeof(double) * p * static_cast<std::size_t>(n));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Zr(
      reinterpret_cast<double*>(raw.data()), n, static_cast<Eigen::Index>(p));
  ds.Z = Zr;
  ds.Q = ds.Z * problem.spectrum.values().cwiseSqrt().asDiagonal();
  ds.y = read_labels(d / "y.i8", n);
  ds.y_hat = read_labels(d / "yhat.i8", n);
  return ds;
}

}  // namespace bo
