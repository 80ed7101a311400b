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
// Parameter sweeps and nested optimizations: optimal twist strength per
// device, Rabi-frequency sweeps at fixed atom number, and particle-number
// scaling with the Rabi frequency optimized per point.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "braggio/calibrate.hpp"
#include "braggio/errors.hpp"
#include "braggio/mzi.hpp"
#include "braggio/parallel.hpp"
#include "braggio/spin_io.hpp"
#include "braggio/states.hpp"

namespace braggio {

// Mirror choice for a sweep: searched on a box, or fixed from configuration.
struct MirrorSpec {
  bool bypass = false;
  double omega0 = 0.0;  // bypass parameters
  double tau = 0.0;
  SearchBox box = default_mirror_box();
  double penalty_weight = 1.0;
};

inline MirrorCalibration resolve_mirror(const MirrorSpec& spec,
                                        const MomentumLadder& ladder,
                                        double window_factor,
                                        const OdeOptions& opts) {
  if (spec.bypass)
    return bypass_mirror(spec.omega0, spec.tau, ladder, window_factor, opts);
  return calibrate_adapted_mirror(spec.box, spec.penalty_weight, ladder,
                                  window_factor, opts);
}

// Everything a sweep needs beyond the grids themselves.
struct SweepSettings {
  int n_atoms = 20000;
  std::vector<double> rabi_grid;    // strictly increasing, > 0
  std::vector<double> dp_list;      // strictly increasing, > 0
  bool q0_reference = true;         // also emit the single-node q = 0 curve
  std::vector<int> n_list;          // particle-number sweep

  MomentumLadder ladder{};
  OdeOptions ode{};
  double window_factor = 6.0;
  int packet_nodes = 64;
  double packet_span = 6.0;
  double packet_clip_tol = 1e-6;
  MirrorSpec mirror{};
  double slope_floor = 1e-12;
  double imag_tol = 1e-10;
  double balance_tol = 1e-6;
  double mu_tol = 1e-3;     // golden-section width target, relative to bracket
  double omega_tol = 1e-3;  // same, for the outer Rabi search
  int workers = 1;
};

inline void validate_sweep_settings(const SweepSettings& s) {
  const auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  if (s.rabi_grid.empty())
    throw InvalidArgument("rabi grid must be nonempty");
  if (!(s.rabi_grid.front() > 0.0) || !increasing(s.rabi_grid))
    throw InvalidArgument("rabi grid must be positive, strictly increasing");
  for (const double dp : s.dp_list) {
    if (dp == 0.0)
      throw InvalidArgument(
          "dp = 0 is not a packet; use the single-node q=0 mode explicitly");
    if (!(dp > 0.0))
      throw InvalidArgument("packet widths must be positive");
  }
  if (!increasing(s.dp_list))
    throw InvalidArgument("packet widths must be strictly increasing");
  if (s.dp_list.empty() && !s.q0_reference)
    throw InvalidArgument("nothing to sweep: no packet widths, no q=0 curve");
  if (s.n_atoms < 1) throw InvalidArgument("need at least one atom");
  for (const int n : s.n_list)
    if (n < 1) throw InvalidArgument("need at least one atom");
  for (std::size_t i = 1; i < s.n_list.size(); ++i)
    if (s.n_list[i] <= s.n_list[i - 1])
      throw InvalidArgument("atom-number list must be strictly increasing");
  if (!(s.mu_tol > 0.0) || !(s.omega_tol > 0.0))
    throw InvalidArgument("optimizer tolerances must be positive");
  if (!(s.slope_floor > 0.0) || !(s.imag_tol > 0.0) || !(s.balance_tol > 0.0))
    throw InvalidArgument("numerical tolerances must be positive");
  if (!(s.ode.rel_tol > 0.0) || !(s.ode.abs_tol > 0.0))
    throw InvalidArgument("integrator tolerances must be positive");
  if (s.packet_nodes < 2)
    throw InvalidArgument("need at least two packet nodes");
  if (!(s.packet_span > 0.0) || !(s.packet_clip_tol > 0.0))
    throw InvalidArgument("packet span and clip tolerance must be positive");
  if (!(s.window_factor >= 4.0))
    throw InvalidArgument("pulse window must be at least 4 sigma");
  if (s.workers < 1) throw InvalidArgument("need at least one worker");
  if (s.mirror.bypass && !(s.mirror.omega0 > 0.0 && s.mirror.tau > 0.0))
    throw InvalidArgument("bypass mirror needs positive omega0 and tau");
}

// One device+packet pair with the transport precomputed at the operating
// point; twist evaluations then cost only the input-state moments.
class Pipeline {
 public:
  Pipeline(const TransferFn& fn, WavePacket packet, double slope_floor = 1e-12,
           double imag_tol = 1e-10)
      : packet_(std::move(packet)), slope_floor_(slope_floor) {
    qm_ = q_matrix(fn, packet_, 0.0, imag_tol);
  }

  const QMatrix& transport() const { return qm_; }
  const WavePacket& packet() const { return packet_; }
  double survival_upper() const { return qm_.q(0, 0) + qm_.q(0, 3); }
  double survival_lower() const { return qm_.q(0, 0) - qm_.q(0, 3); }

  struct Evaluation {
    double dphi = std::numeric_limits<double>::quiet_NaN();
    double theta = 0.0;  // ellipse rotation applied to the input
    double slope = 0.0;  // |d<S_3>/dphi| at the operating point
  };

  Evaluation evaluate(int n_atoms, double mu) const {
    const SpinMoments raw = oat_moments(n_atoms, mu);
    const double theta = aligned_rotation_angle(raw, qm_);
    const SpinMoments in = rotate_about_1(raw, theta);
    Evaluation e;
    e.theta = theta;
    e.dphi = sensitivity(in, qm_, slope_floor_);
    e.slope = std::abs((qm_.dq * in.p)(3));
    return e;
  }

  // +infinity instead of the degenerate-input throws, so scans and golden
  // sections can treat the objective as total.
  double dphi_or_inf(int n_atoms, double mu) const {
    try {
      return evaluate(n_atoms, mu).dphi;
    } catch (const ZeroSlope&) {
      return std::numeric_limits<double>::infinity();
    } catch (const DepolarizedState&) {
      return std::numeric_limits<double>::infinity();
    }
  }

 private:
  WavePacket packet_;
  double slope_floor_;
  QMatrix qm_;
};

struct SqueezeOptimum {
  double mu = 0.0;
  double xi = 1.0;  // input squeezing parameter at mu
  double dphi = std::numeric_limits<double>::quiet_NaN();
  double theta = 0.0;
  double slope = 0.0;
};

namespace detail {

// Golden-section minimum of f on [a, b] down to width tol; f is evaluated,
// never interpolated, so the returned pair is an actual sample.
template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace detail

// Minimizes the phase resolution over the twist strength: mu = 0 plus a
// log-spaced scan up to twice the ideal-device optimum, then golden section
// on the winning bracket.
inline SqueezeOptimum optimize_squeezing(const Pipeline& pipe, int n_atoms,
                                         double mu_tol_rel = 1e-3,
                                         int scan_points = 60) {
  if (scan_points < 3) throw InvalidArgument("need at least 3 scan points");
  const double mu_cap = 2.0 * optimal_mu(n_atoms).mu;

  std::vector<double> grid;
  grid.push_back(0.0);
  const double lo = 1e-4 * mu_cap;
  for (int i = 0; i < scan_points; ++i)
    grid.push_back(lo * std::pow(mu_cap / lo, double(i) / (scan_points - 1)));

  std::size_t best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = pipe.dphi_or_inf(n_atoms, grid[i]);
    if (f < fbest) {
      fbest = f;
      best = i;
    }
  }
  if (!std::isfinite(fbest))
    throw ZeroSlope("no twist strength yields a usable signal");

  const double a = grid[best > 0 ? best - 1 : 0];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  double mu = grid[best];
  if (b > a) {
    const auto [xg, fg] =
        detail::golden_min([&](double m) { return pipe.dphi_or_inf(n_atoms, m); },
                           a, b, mu_tol_rel * (b - a));
    if (fg < fbest) mu = xg;
  }

  SqueezeOptimum opt;
  opt.mu = mu;
  const Pipeline::Evaluation e = pipe.evaluate(n_atoms, mu);
  opt.dphi = e.dphi;
  opt.theta = e.theta;
  opt.slope = e.slope;
  try {
    opt.xi = oat_xi(n_atoms, mu);
  } catch (const DepolarizedState&) {
    opt.xi = std::numeric_limits<double>::quiet_NaN();
  }
  return opt;
}

// One sweep row.  Failed points carry the reason in `error` and NaN results;
// the identifying coordinates stay filled either way.
struct SweepRecord {
  double omega0 = std::numeric_limits<double>::quiet_NaN();
  double tau_bs = std::numeric_limits<double>::quiet_NaN();
  double dp = std::numeric_limits<double>::quiet_NaN();
  int n_atoms = 0;
  double mu_opt = std::numeric_limits<double>::quiet_NaN();
  double xi_opt = std::numeric_limits<double>::quiet_NaN();
  double dphi = std::numeric_limits<double>::quiet_NaN();
  double gain_sqrt_n = std::numeric_limits<double>::quiet_NaN();
  double gain_db = std::numeric_limits<double>::quiet_NaN();
  double survival_1 = std::numeric_limits<double>::quiet_NaN();
  double survival_2 = std::numeric_limits<double>::quiet_NaN();
  double slope = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

// Shared per-sweep state: the resolved mirror, beam-splitter calibrations
// memoized per Rabi frequency, and the pulse-block cache.
class SweepContext {
 public:
  explicit SweepContext(const SweepSettings& cfg)
      : cfg_(cfg),
        mirror_(resolve_mirror(cfg.mirror, cfg.ladder, cfg.window_factor,
                               cfg.ode)),
        cache_(std::make_shared<BlockCache>()) {}

  const SweepSettings& settings() const { return cfg_; }
  const MirrorCalibration& mirror() const { return mirror_; }

  struct BsOutcome {
    std::shared_ptr<const BeamSplitterCalibration> cal;
    std::string error;
  };

  BsOutcome beam_splitter(double omega0) {
    {
      const std::lock_guard<std::mutex> lock(mu_);
      const auto it = bs_.find(omega0);
      if (it != bs_.end()) return it->second;
    }
    BsOutcome out;
    try {
      out.cal = std::make_shared<const BeamSplitterCalibration>(
          calibrate_beam_splitter(omega0, cfg_.ladder, {}, cfg_.balance_tol,
                                  cfg_.window_factor, cfg_.ode));
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    const std::lock_guard<std::mutex> lock(mu_);
    return bs_.emplace(omega0, std::move(out)).first->second;
  }

  WavePacket packet_for(double dp) const {
    if (dp > 0.0)
      return WavePacket::gaussian(dp, cfg_.packet_nodes, cfg_.packet_span,
                                  cfg_.packet_clip_tol);
    return WavePacket::delta();
  }

  Pipeline make_pipeline(const GaussianPulse& bs_pulse,
                         const WavePacket& packet) const {
    const BraggMzi mzi{bs_pulse, mirror_.pulse, cfg_.ladder, cfg_.ode, cache_};
    return Pipeline(mzi.fn(), packet, cfg_.slope_floor, cfg_.imag_tol);
  }

 private:
  SweepSettings cfg_;
  MirrorCalibration mirror_;
  std::shared_ptr<BlockCache> cache_;
  std::mutex mu_;
  std::map<double, BsOutcome> bs_;
};

// Full single-point pipeline: calibrated splitter, shared mirror, packet
// transport, twist optimization.
inline SweepRecord sweep_point(SweepContext& ctx, double omega0, double dp) {
  const SweepSettings& cfg = ctx.settings();
  SweepRecord rec;
  rec.omega0 = omega0;
  rec.dp = dp;
  rec.n_atoms = cfg.n_atoms;
  try {
    const SweepContext::BsOutcome bs = ctx.beam_splitter(omega0);
    if (!bs.cal) {
      rec.error = bs.error;
      return rec;
    }
    rec.tau_bs = bs.cal->pulse.tau;
    const Pipeline pipe = ctx.make_pipeline(bs.cal->pulse, ctx.packet_for(dp));
    const SqueezeOptimum opt = optimize_squeezing(pipe, cfg.n_atoms,
                                                  cfg.mu_tol);
    rec.mu_opt = opt.mu;
    rec.xi_opt = opt.xi;
    rec.dphi = opt.dphi;
    rec.gain_sqrt_n = opt.dphi * std::sqrt(double(cfg.n_atoms));
    rec.gain_db = -20.0 * std::log10(rec.gain_sqrt_n);
    rec.survival_1 = pipe.survival_upper();
    rec.survival_2 = pipe.survival_lower();
    rec.slope = opt.slope;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

// Single-scalar entry point: phase resolution of the calibrated device at
// one (omega0, dp, n, mu).  Errors propagate.
inline double sensitivity_for(double omega0, double dp, int n_atoms, double mu,
                              const SweepSettings& cfg = {}) {
  SweepContext ctx(cfg);
  const SweepContext::BsOutcome bs = ctx.beam_splitter(omega0);
  if (!bs.cal) throw ConvergenceFailure(bs.error);
  const Pipeline pipe = ctx.make_pipeline(bs.cal->pulse, ctx.packet_for(dp));
  return pipe.evaluate(n_atoms, mu).dphi;
}

// Rabi-frequency sweep at fixed atom number: one record per (omega0, dp),
// with the optional single-node q = 0 reference curve first.  Per-point
// failures are recorded, not thrown.
inline std::vector<SweepRecord> sweep_rabi(const SweepSettings& cfg) {
  validate_sweep_settings(cfg);
  SweepContext ctx(cfg);

  struct Task {
    double omega0;
    double dp;
  };
  std::vector<Task> tasks;
  if (cfg.q0_reference)
    for (const double w : cfg.rabi_grid) tasks.push_back({w, 0.0});
  for (const double dp : cfg.dp_list)
    for (const double w : cfg.rabi_grid) tasks.push_back({w, dp});

  parallel_for(std::int64_t(cfg.rabi_grid.size()), cfg.workers,
               [&](std::int64_t i) { ctx.beam_splitter(cfg.rabi_grid[i]); });

  std::vector<SweepRecord> out(tasks.size());
  parallel_for(std::int64_t(tasks.size()), cfg.workers, [&](std::int64_t i) {
    out[i] = sweep_point(ctx, tasks[i].omega0, tasks[i].dp);
  });
  return out;
}

// Lossless reference point: ideal blocks, single node, optimal twist.  Its
// gain equals the best ideal squeezing parameter, the bound every physical
// point must respect.  Sentinel coordinates omega0 = dp = 0.
inline SweepRecord ideal_bound_point(int n_atoms, const SweepSettings& cfg) {
  SweepRecord rec;
  rec.omega0 = 0.0;
  rec.tau_bs = 0.0;
  rec.dp = 0.0;
  rec.n_atoms = n_atoms;
  try {
    const Pipeline pipe(ideal_mzi_fn(), WavePacket::delta(), cfg.slope_floor,
                        cfg.imag_tol);
    const SqueezeOptimum opt = optimize_squeezing(pipe, n_atoms, cfg.mu_tol);
    rec.mu_opt = opt.mu;
    rec.xi_opt = opt.xi;
    rec.dphi = opt.dphi;
    rec.gain_sqrt_n = opt.dphi * std::sqrt(double(n_atoms));
    rec.gain_db = -20.0 * std::log10(rec.gain_sqrt_n);
    rec.survival_1 = 1.0;
    rec.survival_2 = 1.0;
    rec.slope = opt.slope;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

// Best achievable record over the Rabi range for one (n, dp): coarse grid,
// then golden section between the neighbours of the winner.
inline SweepRecord optimize_rabi_point(SweepContext& ctx, int n_atoms,
                                       double dp) {
  const SweepSettings& cfg = ctx.settings();
  SweepRecord rec;
  rec.dp = dp;
  rec.n_atoms = n_atoms;
  try {
    const WavePacket packet = ctx.packet_for(dp);
    std::map<double, SweepRecord> seen;
    const auto eval_at = [&](double omega0) -> double {
      const auto it = seen.find(omega0);
      if (it != seen.end())
        return it->second.error.empty()
                   ? it->second.dphi
                   : std::numeric_limits<double>::infinity();
      SweepRecord r;
      r.omega0 = omega0;
      r.dp = dp;
      r.n_atoms = n_atoms;
      const SweepContext::BsOutcome bs = ctx.beam_splitter(omega0);
      if (!bs.cal) {
        r.error = bs.error;
      } else {
        try {
          r.tau_bs = bs.cal->pulse.tau;
          const Pipeline pipe = ctx.make_pipeline(bs.cal->pulse, packet);
          const SqueezeOptimum opt =
              optimize_squeezing(pipe, n_atoms, cfg.mu_tol);
          r.mu_opt = opt.mu;
          r.xi_opt = opt.xi;
          r.dphi = opt.dphi;
          r.gain_sqrt_n = opt.dphi * std::sqrt(double(n_atoms));
          r.gain_db = -20.0 * std::log10(r.gain_sqrt_n);
          r.survival_1 = pipe.survival_upper();
          r.survival_2 = pipe.survival_lower();
          r.slope = opt.slope;
        } catch (const std::exception& e) {
          r.error = e.what();
        }
      }
      seen.emplace(omega0, r);
      return r.error.empty() ? r.dphi
                             : std::numeric_limits<double>::infinity();
    };

    std::size_t best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.rabi_grid.size(); ++i) {
      const double f = eval_at(cfg.rabi_grid[i]);
      if (f < fbest) {
        fbest = f;
        best = i;
      }
    }
    if (!std::isfinite(fbest)) {
      rec.error = "no grid point calibrated to a usable device";
      return rec;
    }
    double omega_best = cfg.rabi_grid[best];
    const double a = cfg.rabi_grid[best > 0 ? best - 1 : 0];
    const double b = cfg.rabi_grid[std::min(best + 1, cfg.rabi_grid.size() - 1)];
    if (b > a) {
      const auto [xg, fg] =
          detail::golden_min(eval_at, a, b, cfg.omega_tol * (b - a));
      if (fg < fbest) omega_best = xg;
    }
    rec = seen.at(omega_best);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

// Particle-number sweep: per atom number, the ideal bound row first, then the
// optional q = 0 row, then one Rabi-optimized row per packet width.
inline std::vector<SweepRecord> sweep_particles(const SweepSettings& cfg) {
  validate_sweep_settings(cfg);
  if (cfg.n_list.empty())
    throw InvalidArgument("atom-number list must be nonempty");
  SweepContext ctx(cfg);

  struct Task {
    int n_atoms;
    double dp;    // > 0 packet, 0 single node, -1 ideal bound
  };
  std::vector<Task> tasks;
  for (const int n : cfg.n_list) {
    tasks.push_back({n, -1.0});
    if (cfg.q0_reference) tasks.push_back({n, 0.0});
    for (const double dp : cfg.dp_list) tasks.push_back({n, dp});
  }

  parallel_for(std::int64_t(cfg.rabi_grid.size()), cfg.workers,
               [&](std::int64_t i) { ctx.beam_splitter(cfg.rabi_grid[i]); });

  std::vector<SweepRecord> out(tasks.size());
  parallel_for(std::int64_t(tasks.size()), cfg.workers, [&](std::int64_t i) {
    out[i] = tasks[i].dp < 0.0
                 ? ideal_bound_point(tasks[i].n_atoms, cfg)
                 : optimize_rabi_point(ctx, tasks[i].n_atoms, tasks[i].dp);
  });
  return out;
}

}  // namespace braggio
