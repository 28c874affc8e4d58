#include "config.hpp"

#include "bo/bounds.hpp"
#include "bo/errors.hpp"
#include "bo/events.hpp"
#include "bo/experiments.hpp"
#include "bo/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using bo::cli::RunConfig;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.3.0";

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", std::gmtime(&now));
  return buf;
}

// CSV plus a manifest that replays as a config
struct Output {
  const RunConfig& cfg;
  std::string command;
  std::string stamp = timestamp();

  fs::path dir() const {
    fs::path d = cfg.out_dir();
    fs::create_directories(d);
    return d;
  }

  void write(const std::string& csv_text) const {
    if (!cfg.doc()["output"]["csv"].get<bool>()) return;
    const fs::path d = dir();
    const std::string name = bo::sweep_file_name(command, stamp, cfg.seed());
    std::ofstream(d / name) << csv_text;
    json m = cfg.doc();
    m["manifest"] = {{"toolkit", "bo"},      {"version", kVersion}, {"command", command},
                     {"seed", cfg.seed()},  {"csv", name},         {"created", stamp}};
    std::ofstream(d / (name.substr(0, name.size() - 4) + ".manifest.json")) << m.dump(2) << '\n';
    std::cout << "wrote " << (d / name).string() << '\n';
  }
};

std::string rows_csv(const std::vector<bo::SweepRecord>& rows) {
  if (rows.empty()) return "";
  std::string s = bo::sweep_csv_header(rows.front()) + '\n';
  for (const auto& r : rows) s += bo::sweep_csv_row(r) + '\n';
  return s;
}

int cmd_verify(const RunConfig& cfg, double perturb) {
  const auto& e = cfg.doc()["experiment"];
  const auto n = e["instances"].get<std::size_t>();
  const double s = perturb != 0.0 ? perturb : e["perturb_s"].get<double>();
  const auto a = bo::identity_suite(cfg.seed(), n, s);
  const auto b = bo::inequality_suite(cfg.seed(), n);
  std::cout << bo::format_report(a) << bo::format_report(b);
  const bool ok = a.pass() && b.pass();
  std::cout << (ok ? "verify: PASS\n" : "verify: FAIL\n");
  return ok ? 0 : 1;
}

int cmd_bounds(const RunConfig& cfg) {
  const auto ps = cfg.problem();
  ps.validate();
  const auto ro = cfg.run_options();
  const std::size_t k =
      ro.k >= 0 ? static_cast<std::size_t>(ro.k) : bo::k_star(ps.spectrum, ps.lambda_reg, ps.n).k;
  const auto qs = bo::quantities(ps.spectrum, ps.mu, ps.n, k, ps.lambda_reg, ps.eta);
  const auto be = bo::lower_bound(qs, ro.t);
  const double cgb = bo::cgb_bound(ps.spectrum, ps.mu, ps.n);
  const auto ch = bo::chatterji_scaled(ps.mu.squaredNorm(), double(ps.p()), ps.n, 1.0);
  std::string csv = bo::bounds_csv_header() + ",tight_ratio,upper_ratio,cgb,chatterji_theirs,chatterji_ours\n";
  char extra[160];
  std::snprintf(extra, sizeof extra, ",%.17g,%.17g,%.17g,%.17g,%.17g\n", qs.tight_ratio(),
                qs.upper_ratio(), cgb, ch.theirs, ch.ours);
  csv += bo::bounds_csv_row(qs, be) + extra;
  std::cout << csv;
  Output{cfg, "bounds"}.write(csv);
  return 0;
}

int cmd_sweep_mu(const RunConfig& cfg) {
  cfg.validate();
  const auto rows = bo::sweep_mu_scale(cfg.problem(), cfg.mu_direction(), cfg.vec("scales"),
                                       cfg.run_options());
  Output{cfg, "sweep-mu"}.write(rows_csv(rows));
  return 0;
}

int cmd_sweep_lambda(const RunConfig& cfg) {
  cfg.validate();
  const auto rows = bo::sweep_lambda(cfg.problem(), cfg.vec("lambdas"), cfg.run_options());
  Output{cfg, "sweep-lambda"}.write(rows_csv(rows));
  return 0;
}

int cmd_phase(const RunConfig& cfg) {
  const auto rows = bo::phase_scan(cfg.phase_options());
  for (const auto& r : rows)
    std::printf("q=%g n=%g ratio=%.6f\n", r.keys[0].second, r.keys[1].second, r.bound_ratio);
  Output{cfg, "phase"}.write(rows_csv(rows));
  return 0;
}

int cmd_demo(const RunConfig& cfg) {
  cfg.validate();
  const auto ps = cfg.problem();
  const auto ro = cfg.run_options();
  const Eigen::VectorXd dir = cfg.mu_direction();
  double m = cfg.doc()["experiment"]["mu_scale"].get<double>();
  if (m <= 0) {
    const std::size_t k = ro.k >= 0 ? static_cast<std::size_t>(ro.k) : bo::k_star(ps.spectrum, 0.0, ps.n).k;
    m = bo::benign_scale(ps.spectrum, dir, ps.n, k);
  }
  const auto rows = bo::benign_demo(ps.spectrum, dir, m, ps.n, ps.eta, ro);
  if (!rows.empty())
    std::printf("mu_scale=%.6g train_residual_med=%.3e test_error_med=%.4f eta=%g\n", m,
                rows[0].train_residual_med, rows[0].test_error_med, ps.eta);
  if (cfg.doc()["output"]["dump_dataset"].get<bool>()) {
    auto p2 = ps;
    p2.mu = m * dir.normalized();
    const auto ds = bo::sample_dataset(p2, ro.seed, 0);
    bo::dump_dataset(ds, p2, (fs::path(cfg.out_dir()) / "dataset_trial0").string(),
                     cfg.doc()["problem"]["spectrum"].dump());
  }
  Output{cfg, "demo"}.write(rows_csv(rows));
  return 0;
}

int cmd_events(const RunConfig& cfg) {
  cfg.validate();
  const auto ps = cfg.problem();
  const auto ro = cfg.run_options();
  const std::size_t k = ro.k >= 0 ? static_cast<std::size_t>(ro.k) : 0;
  std::vector<bo::EventReport> reps(ro.trials);
  bo::parallel_for(ro.trials, ro.threads, [&](std::size_t t) {
    const auto ds = bo::sample_dataset(ps, ro.seed, t);
    auto r = bo::check_B_k(ds, ps.spectrum, ps.mu, k);
    r.lambda_reg = ps.lambda_reg;
    r.L_measured = bo::check_A_k(ds, ps.spectrum, k, ps.lambda_reg);
    reps[t] = r;
  });
  std::string csv = bo::events_csv_header() + '\n';
  for (std::size_t t = 0; t < reps.size(); ++t) csv += bo::events_csv_row(t, reps[t]) + '\n';
  Output{cfg, "events"}.write(csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benign-overfitting and ridge/MNI classification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  std::vector<std::string> sets;
  auto* seed_opt = app.add_option("--seed", seed, "master seed (default 0)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (default: all cores)");
  auto* out_opt = app.add_option("--out", out, "output directory");
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override a config key, e.g. --set problem.n=200");
  app.set_version_flag("--version", kVersion);

  double perturb = 0.0;
  auto* verify = app.add_subcommand("verify", "run the identity and inequality suites");
  verify->add_option("--perturb-s", perturb, "corrupt S by this relative amount (test hook)");
  auto* bounds = app.add_subcommand("bounds", "evaluate the quantity set and bounds");
  auto* sweep_mu = app.add_subcommand("sweep-mu", "Monte-Carlo sweep over the mu scale");
  auto* sweep_lambda = app.add_subcommand("sweep-lambda", "Monte-Carlo sweep over lambda");
  auto* phase = app.add_subcommand("phase", "bi-level phase-transition scan");
  auto* demo = app.add_subcommand("demo", "benign-overfitting demonstration");
  auto* events = app.add_subcommand("events", "measure the A_k / B_k event constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig::from_json(json()) : RunConfig::from_file(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw bo::ConfigError("--set expects key=value, got " + s);
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (*seed_opt) cfg.set("experiment.seed", std::to_string(seed));
    if (*threads_opt) cfg.set("experiment.threads", std::to_string(threads));
    if (*out_opt) cfg.set("output.dir", json(out).dump());

    if (*verify) return cmd_verify(cfg, perturb);
    if (*bounds) return cmd_bounds(cfg);
    if (*sweep_mu) return cmd_sweep_mu(cfg);
    if (*sweep_lambda) return cmd_sweep_lambda(cfg);
    if (*phase) return cmd_phase(cfg);
    if (*demo) return cmd_demo(cfg);
    if (*events) return cmd_events(cfg);
  } catch (const bo::Error& e) {
    std::cerr << "bo: " << e.what() << '\n';
    return bo::exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bo: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bo: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
