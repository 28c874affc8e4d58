#pragma once

#include "bo/experiments.hpp"
#include "bo/model.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace bo::cli {

// A run configuration: the user's JSON merged over the defaults. Every key
// must already exist in the defaults; the "manifest" block of an emitted run
// manifest is accepted and ignored so manifests replay as configs.
class RunConfig {
 public:
  static nlohmann::json defaults();
  static RunConfig from_json(const nlohmann::json& user);
  static RunConfig from_file(const std::string& path);

  // dotted path, e.g. "problem.n"; the value is parsed as JSON, else taken as a string
  void set(const std::string& path, const std::string& value);

  const nlohmann::json& doc() const { return doc_; }
  std::uint64_t seed() const;
  unsigned threads() const;
  std::string out_dir() const;

  // Resolution is deferred so that overrides apply before anything is built.
  ProblemSpec problem() const;
  Eigen::VectorXd mu_direction() const;  // unnormalised mu before scale
  RunOptions run_options() const;
  PhaseOptions phase_options() const;
  std::vector<double> vec(const std::string& experiment_key) const;

  void validate() const;  // throws ConfigError / InvalidParams before any sampling

 private:
  nlohmann::json doc_;
};

}  // namespace bo::cli
