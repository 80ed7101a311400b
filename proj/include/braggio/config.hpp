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
// JSON configuration: defaults, strict schema checking, and the fully
// materialized run manifest (no hidden defaults survive into a run).

#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

#include "braggio/errors.hpp"
#include "braggio/optimize.hpp"
#include "braggio/version.hpp"

namespace braggio {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
  SweepSettings sweep;
  std::string output_dir = ".";
};

namespace detail {

inline void require_keys(const ordered_json& j, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw InvalidArgument("config section '" + where + "' must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known)
      throw InvalidArgument("unknown config key '" + where +
                            (where.empty() ? "" : ".") + item.key() + "'");
  }
}

template <typename T>
T config_get(const ordered_json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("bad config value for '") + key +
                          "': " + e.what());
  }
}

}  // namespace detail

inline RunConfig config_from_json(const ordered_json& j) {
  using detail::config_get;
  using detail::require_keys;

  RunConfig c;
  SweepSettings& s = c.sweep;
  s.rabi_grid = {4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  s.dp_list = {0.01, 0.05, 0.1};
  s.n_list = {100, 1000, 10000, 20000};

  require_keys(j, "", {"solver", "packet", "mirror", "optimizer", "sweep",
                       "workers", "output_dir"});

  if (j.contains("solver")) {
    const ordered_json& v = j.at("solver");
    require_keys(v, "solver", {"m_max", "window_factor", "rel_tol", "abs_tol"});
    s.ladder = MomentumLadder(config_get(v, "m_max", 11));
    s.window_factor = config_get(v, "window_factor", 6.0);
    s.ode.rel_tol = config_get(v, "rel_tol", s.ode.rel_tol);
    s.ode.abs_tol = config_get(v, "abs_tol", s.ode.abs_tol);
  }
  if (j.contains("packet")) {
    const ordered_json& v = j.at("packet");
    require_keys(v, "packet", {"nodes", "span", "clip_tol"});
    s.packet_nodes = config_get(v, "nodes", s.packet_nodes);
    s.packet_span = config_get(v, "span", s.packet_span);
    s.packet_clip_tol = config_get(v, "clip_tol", s.packet_clip_tol);
  }
  if (j.contains("mirror")) {
    const ordered_json& v = j.at("mirror");
    require_keys(v, "mirror",
                 {"mode", "omega0", "tau", "penalty_weight", "box"});
    const std::string mode = config_get<std::string>(v, "mode", "calibrated");
    if (mode == "bypass")
      s.mirror.bypass = true;
    else if (mode != "calibrated")
      throw InvalidArgument("mirror.mode must be 'calibrated' or 'bypass'");
    s.mirror.omega0 = config_get(v, "omega0", 0.0);
    s.mirror.tau = config_get(v, "tau", 0.0);
    s.mirror.penalty_weight =
        config_get(v, "penalty_weight", s.mirror.penalty_weight);
    if (v.contains("box")) {
      const ordered_json& b = v.at("box");
      require_keys(b, "mirror.box",
                   {"omega_lo", "omega_hi", "tau_lo", "tau_hi"});
      s.mirror.box.omega_lo = config_get(b, "omega_lo", s.mirror.box.omega_lo);
      s.mirror.box.omega_hi = config_get(b, "omega_hi", s.mirror.box.omega_hi);
      s.mirror.box.tau_lo = config_get(b, "tau_lo", s.mirror.box.tau_lo);
      s.mirror.box.tau_hi = config_get(b, "tau_hi", s.mirror.box.tau_hi);
    }
  }
  if (j.contains("optimizer")) {
    const ordered_json& v = j.at("optimizer");
    require_keys(v, "optimizer",
                 {"mu_tol", "omega_tol", "slope_floor", "balance_tol",
                  "imag_tol"});
    s.mu_tol = config_get(v, "mu_tol", s.mu_tol);
    s.omega_tol = config_get(v, "omega_tol", s.omega_tol);
    s.slope_floor = config_get(v, "slope_floor", s.slope_floor);
    s.balance_tol = config_get(v, "balance_tol", s.balance_tol);
    s.imag_tol = config_get(v, "imag_tol", s.imag_tol);
  }
  if (j.contains("sweep")) {
    const ordered_json& v = j.at("sweep");
    require_keys(v, "sweep",
                 {"n_atoms", "rabi_grid", "dp", "q0_reference", "n_list"});
    s.n_atoms = config_get(v, "n_atoms", s.n_atoms);
    s.rabi_grid = config_get(v, "rabi_grid", s.rabi_grid);
    s.dp_list = config_get(v, "dp", s.dp_list);
    s.q0_reference = config_get(v, "q0_reference", s.q0_reference);
    s.n_list = config_get(v, "n_list", s.n_list);
  }
  s.workers = config_get(j, "workers", s.workers);
  c.output_dir = config_get<std::string>(j, "output_dir", c.output_dir);

  validate_sweep_settings(s);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

// Every setting, resolved: a run is reproducible from this object alone.
inline ordered_json materialize(const RunConfig& c) {
  const SweepSettings& s = c.sweep;
  ordered_json j;
  j["solver"] = {{"m_max", s.ladder.m_max()},
                 {"window_factor", s.window_factor},
                 {"rel_tol", s.ode.rel_tol},
                 {"abs_tol", s.ode.abs_tol}};
  j["packet"] = {{"nodes", s.packet_nodes},
                 {"span", s.packet_span},
                 {"clip_tol", s.packet_clip_tol}};
  j["mirror"] = {{"mode", s.mirror.bypass ? "bypass" : "calibrated"},
                 {"omega0", s.mirror.omega0},
                 {"tau", s.mirror.tau},
                 {"penalty_weight", s.mirror.penalty_weight},
                 {"box",
                  {{"omega_lo", s.mirror.box.omega_lo},
                   {"omega_hi", s.mirror.box.omega_hi},
                   {"tau_lo", s.mirror.box.tau_lo},
                   {"tau_hi", s.mirror.box.tau_hi}}}};
  j["optimizer"] = {{"mu_tol", s.mu_tol},
                    {"omega_tol", s.omega_tol},
                    {"slope_floor", s.slope_floor},
                    {"balance_tol", s.balance_tol},
                    {"imag_tol", s.imag_tol}};
  j["sweep"] = {{"n_atoms", s.n_atoms},
                {"rabi_grid", s.rabi_grid},
                {"dp", s.dp_list},
                {"q0_reference", s.q0_reference},
                {"n_list", s.n_list}};
  j["workers"] = s.workers;
  j["output_dir"] = c.output_dir;
  return j;
}

inline ordered_json run_manifest(const RunConfig& c,
                                 const std::string& command) {
  ordered_json j;
  j["artifact"] = "braggio";
  j["version"] = version_string;
  j["csv_schema"] = "sweep-v1";
  j["command"] = command;
  j["config"] = materialize(c);
  return j;
}

}  // namespace braggio
