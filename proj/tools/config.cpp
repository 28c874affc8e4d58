#include "config.hpp"

#include "bo/errors.hpp"

#include <fstream>
#include <sstream>

namespace bo::cli {

using nlohmann::json;

namespace {

void merge(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (where.empty() && it.key() == "manifest") continue;
    if (!base.contains(it.key())) throw ConfigError("unknown key '" + path + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), path);
    } else if (!slot.is_null() && !it.value().is_null() &&
               (slot.is_number() != it.value().is_number() ||
                slot.is_string() != it.value().is_string() ||
                slot.is_array() != it.value().is_array() ||
                slot.is_boolean() != it.value().is_boolean())) {
      throw ConfigError("key '" + path + "' has the wrong type");
    } else {
      slot = it.value();
    }
  }
}

std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    v.push_back(std::stod(line));
  }
  return v;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace

json RunConfig::defaults() {
  return json::parse(R"({
    "problem": {
      "spectrum": {
        "kind": "isotropic",
        "p": 1000, "value": 1.0,
        "values": [], "path": "",
        "spikes": [], "tail": 1.0,
        "s": 1.5, "q": 0.5, "r": 0.5,
        "example": "tail-balance", "k": 10,
        "a": 4.0, "b": 0.0, "c": 2.0, "c1": 2.0, "corollary_p": 0
      },
      "mu": {"direction": "e", "index": 1, "scale": 1.0, "values": [], "path": ""},
      "n": 100,
      "eta": 0.0,
      "lambda": null,
      "law": "gaussian"
    },
    "experiment": {
      "seed": 0,
      "threads": 0,
      "trials": 100,
      "eps": [0.05, 0.1, 0.25],
      "t": 0.0,
      "k": -1,
      "scales": [1, 2, 4, 8, 16],
      "lambdas": [0.0],
      "q_grid": [0.5, 0.75, 0.95],
      "n_grid": [100, 1000, 10000],
      "r": 0.5,
      "s": 1.5,
      "max_p": 0,
      "mu_scale": 0.0,
      "instances": 200,
      "perturb_s": 0.0
    },
    "output": {"dir": "out", "csv": true, "dump_dataset": false}
  })");
}

RunConfig RunConfig::from_json(const json& user) {
  RunConfig c;
  c.doc_ = defaults();
  if (!user.is_null()) merge(c.doc_, user, "");
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return from_json(json());
  try {
    return from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void RunConfig::set(const std::string& path, const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  // build {"a": {"b": v}} and merge it so unknown keys are rejected the same way
  json patch = v;
  std::string rest = path;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1))
    parts.push_back(rest.substr(0, pos));
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge(doc_, patch, "");
}

std::uint64_t RunConfig::seed() const { return get<std::uint64_t>(doc_["experiment"], "seed"); }
unsigned RunConfig::threads() const { return get<unsigned>(doc_["experiment"], "threads"); }
std::string RunConfig::out_dir() const { return get<std::string>(doc_["output"], "dir"); }

std::vector<double> RunConfig::vec(const std::string& key) const {
  return get<std::vector<double>>(doc_["experiment"], key.c_str());
}

namespace {

bool is_corollary(const json& s) { return get<std::string>(s, "kind") == "corollary"; }

CorollaryExample corollary(const json& s, int n) {
  CorollaryParams P;
  P.a = get<double>(s, "a");
  P.b = get<double>(s, "b");
  P.c = get<double>(s, "c");
  P.c1 = get<double>(s, "c1");
  P.p = get<std::size_t>(s, "corollary_p");
  return make_corollary_example(corollary_kind_from(get<std::string>(s, "example")), n,
                                get<int>(s, "k"), P);
}

}  // namespace

ProblemSpec RunConfig::problem() const {
  const json& pr = doc_["problem"];
  const json& s = pr["spectrum"];
  const int n = get<int>(pr, "n");
  const std::string kind = get<std::string>(s, "kind");

  std::optional<CorollaryExample> ex;
  std::vector<double> values;
  if (kind == "isotropic") {
    values.assign(get<std::size_t>(s, "p"), get<double>(s, "value"));
  } else if (kind == "explicit") {
    values = get<std::vector<double>>(s, "values");
  } else if (kind == "file") {
    values = read_column(get<std::string>(s, "path"));
  } else if (kind == "spiked") {
    values = get<std::vector<double>>(s, "spikes");
    const auto p = get<std::size_t>(s, "p");
    if (values.size() > p) throw ConfigError("more spikes than p");
    values.resize(p, get<double>(s, "tail"));
  } else if (kind == "bilevel") {
    const Spectrum b = make_bilevel(n, get<double>(s, "s"), get<double>(s, "q"), get<double>(s, "r"));
    values.assign(b.values().data(), b.values().data() + b.size());
  } else if (kind == "corollary") {
    ex = corollary(s, n);
  } else {
    throw ConfigError("unknown spectrum kind '" + kind + "'");
  }
  Spectrum spec = ex ? ex->spectrum : make_explicit(std::move(values));

  ProblemSpec ps{spec, Eigen::VectorXd(), n, get<double>(pr, "eta"), 0.0,
                 law_from(get<std::string>(pr, "law"))};
  const Eigen::VectorXd dir = mu_direction();
  const std::string d = get<std::string>(pr["mu"], "direction");
  const double scale = get<double>(pr["mu"], "scale");
  const bool normalise = d == "e" || d == "uniform";
  ps.mu = (normalise && dir.norm() > 0 ? Eigen::VectorXd(dir / dir.norm()) : dir) * scale;
  ps.lambda_reg = pr["lambda"].is_null() ? (ex ? ex->lambda_reg : 0.0) : get<double>(pr, "lambda");
  return ps;
}

Eigen::VectorXd RunConfig::mu_direction() const {
  const json& pr = doc_["problem"];
  const json& m = pr["mu"];
  const json& s = pr["spectrum"];
  const std::string d = get<std::string>(m, "direction");
  std::size_t p = 0;
  const std::string kind = get<std::string>(s, "kind");
  if (kind == "isotropic" || kind == "spiked") p = get<std::size_t>(s, "p");
  else if (kind == "explicit") p = get<std::vector<double>>(s, "values").size();
  else if (kind == "file") p = read_column(get<std::string>(s, "path")).size();
  else if (kind == "bilevel")
    p = make_bilevel(get<int>(pr, "n"), get<double>(s, "s"), get<double>(s, "q"), get<double>(s, "r")).size();
  const auto P = static_cast<Eigen::Index>(p);

  if (d == "corollary") {
    if (!is_corollary(s)) throw ConfigError("mu direction 'corollary' needs a corollary spectrum");
    return corollary(s, get<int>(pr, "n")).mu;
  }
  if (kind == "corollary") throw ConfigError("a corollary spectrum needs mu direction 'corollary'");
  if (d == "e") {
    const auto j = get<long>(m, "index");
    if (j < 1 || j > P) throw ConfigError("mu index out of range");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(P);
    v[j - 1] = 1.0;
    return v;
  }
  if (d == "uniform") return Eigen::VectorXd::Ones(P);
  std::vector<double> vals;
  if (d == "explicit") vals = get<std::vector<double>>(m, "values");
  else if (d == "file") vals = read_column(get<std::string>(m, "path"));
  else throw ConfigError("unknown mu direction '" + d + "'");
  if (static_cast<Eigen::Index>(vals.size()) != P) throw ConfigError("mu length differs from p");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), P);
}

RunOptions RunConfig::run_options() const {
  const json& e = doc_["experiment"];
  RunOptions o;
  o.seed = seed();
  o.threads = threads();
  o.trials = get<std::size_t>(e, "trials");
  o.eps = get<std::vector<double>>(e, "eps");
  o.t = get<double>(e, "t");
  o.k = get<long>(e, "k");
  return o;
}

PhaseOptions RunConfig::phase_options() const {
  const json& e = doc_["experiment"];
  PhaseOptions o;
  o.r = get<double>(e, "r");
  o.s = get<double>(e, "s");
  o.q_grid = get<std::vector<double>>(e, "q_grid");
  o.n_grid = get<std::vector<int>>(e, "n_grid");
  o.max_p = get<std::size_t>(e, "max_p");
  o.run = run_options();
  return o;
}

void RunConfig::validate() const {
  const RunOptions o = run_options();
  for (double e : o.eps)
    if (!(e > 0 && e < 1)) throw ConfigError("eps values must lie in (0, 1)");
  if (o.t < 0) throw ConfigError("t must be nonnegative");
  problem().validate();
}

}  // namespace bo::cli
