// Copyright 2026 The braggio authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line frontend: configuration ingestion, pipeline orchestration,
// CSV/report emission, and the verification suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "braggio/calibrate.hpp"
#include "braggio/config.hpp"
#include "braggio/csv.hpp"
#include "braggio/errors.hpp"
#include "braggio/mzi.hpp"
#include "braggio/optimize.hpp"
#include "braggio/states.hpp"
#include "braggio/verify.hpp"
#include "braggio/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCalibration = 2;
constexpr int kExitVerification = 3;

std::string num(double v) { return braggio::csv_number(v); }

// Config errors (bad file, bad values) must exit 1 before any physics runs.
bool load_into(const std::string& config_path, braggio::RunConfig& cfg) {
  try {
    if (!config_path.empty()) cfg = braggio::load_config(config_path);
    return true;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return false;
  }
}

bool write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot open %s for writing\n", path.c_str());
    return false;
  }
  out << text;
  out.flush();
  return bool(out);
}

int run_calibrate(const braggio::RunConfig& cfg, const std::string& pulse,
                  double rabi, double tau, bool bypass) {
  const braggio::SweepSettings& s = cfg.sweep;
  try {
    if (pulse == "bs") {
      const braggio::BeamSplitterCalibration cal =
          braggio::calibrate_beam_splitter(rabi, s.ladder, {}, s.balance_tol,
                                           s.window_factor, s.ode);
      std::printf("pulse bs\n");
      std::printf("omega0 %s\n", num(cal.pulse.omega0).c_str());
      std::printf("tau %s\n", num(cal.pulse.tau).c_str());
      std::printf("balance_residual %s\n", num(cal.balance_residual).c_str());
      std::printf("reflect_third %s\n",
                  num(cal.efficiencies.reflect_third).c_str());
      std::printf("transmit_third %s\n",
                  num(cal.efficiencies.transmit_third).c_str());
      std::printf("reflect_first %s\n",
                  num(cal.efficiencies.reflect_first).c_str());
      std::printf("m_max %d\n", cal.m_max);
      return kExitOk;
    }
    braggio::MirrorSpec spec = s.mirror;
    if (bypass) {
      spec.bypass = true;
      spec.omega0 = rabi;
      spec.tau = tau;
    }
    if (spec.bypass && !(spec.omega0 > 0.0 && spec.tau > 0.0)) {
      std::fprintf(stderr,
                   "config error: bypass mirror needs --rabi and --tau\n");
      return kExitConfig;
    }
    const braggio::MirrorCalibration cal =
        braggio::resolve_mirror(spec, s.ladder, s.window_factor, s.ode);
    std::printf("pulse mirror\n");
    std::printf("mode %s\n", cal.bypass ? "bypass" : "calibrated");
    std::printf("omega0 %s\n", num(cal.pulse.omega0).c_str());
    std::printf("tau %s\n", num(cal.pulse.tau).c_str());
    std::printf("objective %s\n", num(cal.objective).c_str());
    std::printf("reflect_third %s\n",
                num(cal.efficiencies.reflect_third).c_str());
    std::printf("transmit_third %s\n",
                num(cal.efficiencies.transmit_third).c_str());
    std::printf("reflect_first %s\n",
                num(cal.efficiencies.reflect_first).c_str());
    std::printf("m_max %d\n", cal.m_max);
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "calibration failure: %s\n", e.what());
    return kExitCalibration;
  }
}

int run_moments(int n_atoms, double mu, double theta, bool theta_given) {
  try {
    const double th =
        theta_given ? theta : braggio::optimal_theta(n_atoms, mu);
    const braggio::SpinMoments m =
        braggio::rotate_about_1(braggio::oat_moments(n_atoms, mu), th);
    std::printf("n_atoms %d\n", n_atoms);
    std::printf("mu %s\n", num(mu).c_str());
    std::printf("theta %s%s\n", num(th).c_str(),
                theta_given ? "" : " (minimizes the axis-2 variance)");
    std::printf("p %s %s %s %s\n", num(m.p(0)).c_str(), num(m.p(1)).c_str(),
                num(m.p(2)).c_str(), num(m.p(3)).c_str());
    for (int a = 0; a < 4; ++a)
      std::printf("gamma %s %s %s %s\n", num(m.gamma(a, 0)).c_str(),
                  num(m.gamma(a, 1)).c_str(), num(m.gamma(a, 2)).c_str(),
                  num(m.gamma(a, 3)).c_str());
    try {
      std::printf("xi %s\n", num(braggio::wineland_xi(m)).c_str());
    } catch (const braggio::DepolarizedState&) {
      std::printf("xi depolarized\n");
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
}

int run_sensitivity(const braggio::RunConfig& cfg, double rabi, double dp,
                    int n_atoms, double mu, bool mu_given, double xi,
                    bool xi_given) {
  braggio::SweepSettings s = cfg.sweep;
  s.n_atoms = n_atoms;
  try {
    braggio::SweepContext ctx(s);
    const braggio::SweepContext::BsOutcome bs = ctx.beam_splitter(rabi);
    if (!bs.cal) {
      std::fprintf(stderr, "calibration failure: %s\n", bs.error.c_str());
      return kExitCalibration;
    }
    const braggio::Pipeline pipe =
        ctx.make_pipeline(bs.cal->pulse, ctx.packet_for(dp));

    double mu_used = mu;
    std::string mu_origin = "given";
    if (xi_given) {
      mu_used = braggio::xi_to_mu(n_atoms, xi);
      mu_origin = "from xi";
    } else if (!mu_given) {
      mu_used = braggio::optimize_squeezing(pipe, n_atoms, s.mu_tol).mu;
      mu_origin = "optimized";
    }
    const braggio::Pipeline::Evaluation e = pipe.evaluate(n_atoms, mu_used);
    const double gain = e.dphi * std::sqrt(double(n_atoms));

    std::printf("omega0 %s\n", num(rabi).c_str());
    std::printf("tau_bs %s\n", num(bs.cal->pulse.tau).c_str());
    std::printf("dp %s\n", num(dp).c_str());
    std::printf("n_atoms %d\n", n_atoms);
    std::printf("mu %s (%s)\n", num(mu_used).c_str(), mu_origin.c_str());
    std::printf("xi_input %s\n", num(braggio::oat_xi(n_atoms, mu_used)).c_str());
    std::printf("theta %s\n", num(e.theta).c_str());
    std::printf("dphi %s\n", num(e.dphi).c_str());
    std::printf("gain_sqrtN %s\n", num(gain).c_str());
    std::printf("gain_db %s\n", num(-20.0 * std::log10(gain)).c_str());
    std::printf("survival_1 %s\n", num(pipe.survival_upper()).c_str());
    std::printf("survival_2 %s\n", num(pipe.survival_lower()).c_str());
    std::printf("slope %s\n", num(e.slope).c_str());
    return kExitOk;
  } catch (const braggio::InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "calibration failure: %s\n", e.what());
    return kExitCalibration;
  }
}

int run_sweep(const braggio::RunConfig& cfg, const std::string& kind) {
  std::vector<braggio::SweepRecord> records;
  try {
    records = kind == "rabi" ? braggio::sweep_rabi(cfg.sweep)
                             : braggio::sweep_particles(cfg.sweep);
  } catch (const braggio::InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "calibration failure: %s\n", e.what());
    return kExitCalibration;
  }

  int failed = 0;
  for (const braggio::SweepRecord& r : records)
    if (!r.error.empty()) ++failed;
  if (failed == int(records.size())) {
    std::fprintf(stderr, "calibration failure: every grid point failed\n");
    for (const braggio::SweepRecord& r : records)
      std::fprintf(stderr, "  omega0=%g dp=%g n=%d: %s\n", r.omega0, r.dp,
                   r.n_atoms, r.error.c_str());
    return kExitCalibration;
  }

  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string stem = kind == "rabi" ? "sweep_rabi" : "sweep_n";
  const std::filesystem::path csv_path = dir / (stem + ".csv");
  const std::filesystem::path manifest_path = dir / (stem + ".manifest.json");
  if (!write_file(csv_path, braggio::sweep_csv(records))) return kExitConfig;
  if (!write_file(manifest_path,
                  braggio::run_manifest(cfg, "sweep-" + kind).dump(2) + "\n"))
    return kExitConfig;

  std::printf("%zu points (%d failed) -> %s\n", records.size(), failed,
              csv_path.c_str());
  return kExitOk;
}

int run_verify(unsigned seed, bool inject_fault) {
  const braggio::VerifyReport rep =
      braggio::run_verification(seed, inject_fault);
  for (const braggio::CheckResult& c : rep.checks)
    std::printf("[%s] %s: worst deviation %s (tolerance %s)\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), num(c.worst).c_str(),
                num(c.tol).c_str());
  if (!rep.pass) {
    std::fprintf(stderr, "verification failed\n");
    return kExitVerification;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-sensitivity engine for lossy multi-path Bragg "
               "interferometers with twisted spin inputs"};
  app.set_version_flag("--version", braggio::version_string);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 0;

  auto* cal = app.add_subcommand("calibrate", "calibrate a pulse at q = 0");
  std::string pulse;
  double cal_rabi = 0.0, cal_tau = 0.0;
  bool cal_bypass = false;
  cal->add_option("--pulse", pulse, "bs or mirror")
      ->required()
      ->check(CLI::IsMember({"bs", "mirror"}));
  cal->add_option("--rabi", cal_rabi, "peak Rabi frequency");
  cal->add_option("--tau", cal_tau, "pulse duration (bypass mirror)");
  cal->add_flag("--bypass", cal_bypass, "take (--rabi, --tau) verbatim");
  cal->add_option("--config", config_path, "configuration file");

  auto* mom = app.add_subcommand("moments", "input-state spin moments");
  int mom_n = 100;
  double mom_mu = 0.0, mom_theta = 0.0;
  mom->add_option("--n", mom_n, "atom number")->required();
  mom->add_option("--mu", mom_mu, "twist strength");
  auto* mom_theta_opt =
      mom->add_option("--theta", mom_theta, "ellipse rotation");

  auto* sen = app.add_subcommand("sensitivity",
                                 "phase resolution of the calibrated device");
  double sen_rabi = 0.0, sen_dp = 0.0, sen_mu = 0.0, sen_xi = 0.0;
  int sen_n = 20000;
  sen->add_option("--rabi", sen_rabi, "beam-splitter peak Rabi frequency")
      ->required();
  sen->add_option("--dp", sen_dp, "packet width (0 = single-node q=0)");
  sen->add_option("--n", sen_n, "atom number");
  auto* sen_mu_opt = sen->add_option("--mu", sen_mu, "twist strength");
  auto* sen_xi_opt =
      sen->add_option("--xi", sen_xi, "target input squeezing parameter");
  sen_mu_opt->excludes(sen_xi_opt);
  sen->add_option("--config", config_path, "configuration file");

  auto* swr = app.add_subcommand("sweep-rabi",
                                 "Rabi-frequency sweep at fixed atom number");
  auto* swn = app.add_subcommand("sweep-n", "particle-number sweep");
  for (auto* sc : {swr, swn}) {
    sc->add_option("--config", config_path, "configuration file");
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--workers", workers, "worker threads");
  }

  auto* ver = app.add_subcommand("verify", "run the self-verification suite");
  unsigned seed = 1;
  bool inject_fault = false;
  ver->add_option("--seed", seed, "random-trial seed");
  ver->add_flag("--inject-fault", inject_fault,
                "flip the loss-noise sign (suite must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  braggio::RunConfig cfg;
  if (!load_into(config_path, cfg)) return kExitConfig;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (workers > 0) cfg.sweep.workers = workers;

  if (cal->parsed())
    return run_calibrate(cfg, pulse, cal_rabi, cal_tau, cal_bypass);
  if (mom->parsed())
    return run_moments(mom_n, mom_mu, mom_theta, mom_theta_opt->count() > 0);
  if (sen->parsed())
    return run_sensitivity(cfg, sen_rabi, sen_dp, sen_n, sen_mu,
                           sen_mu_opt->count() > 0, sen_xi,
                           sen_xi_opt->count() > 0);
  if (swr->parsed()) return run_sweep(cfg, "rabi");
  if (swn->parsed()) return run_sweep(cfg, "n");
  if (ver->parsed()) return run_verify(seed, inject_fault);
  return kExitConfig;
}
