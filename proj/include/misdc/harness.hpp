#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "misdc/analysis.hpp"
#include "misdc/errors.hpp"
#include "misdc/testpde.hpp"

namespace misdc::harness {

enum class StudyMode { order_study, region_scan, limit_check, single_run };
enum class OutputFormat { csv, json };
enum class CoarseningMode { direct_injection, two_cell_average };

inline const char* mode_name(StudyMode m) {
  switch (m) {
    case StudyMode::order_study: return "order-study";
    case StudyMode::region_scan: return "region-scan";
    case StudyMode::limit_check: return "limit-check";
    case StudyMode::single_run: return "single-run";
  }
  return "?";
}

inline std::optional<StudyMode> parse_mode(const std::string& s) {
  if (s == "order-study") return StudyMode::order_study;
  if (s == "region-scan") return StudyMode::region_scan;
  if (s == "limit-check") return StudyMode::limit_check;
  if (s == "single-run") return StudyMode::single_run;
  return std::nullopt;
}

/// Flat key-value study description; every mode reads the subset of fields
/// it needs and ignores the rest.
struct StudyConfig {
  StudyMode mode = StudyMode::order_study;
  pde::TestPdeConfig pde;
  std::vector<int> n_ladder{200, 400, 800, 1600};

  // region scan
  double scan_a = 0.0;
  double d_dt_min = -40.0, d_dt_max = 4.0;
  double r_dt_min = -40.0, r_dt_max = 4.0;
  int scan_resolution = 45;

  // limit check
  double a_tilde = 1.0, d_tilde = 1.0, lambda = 0.5;
  std::vector<double> dx_ladder{1e-1, 1e-2, 1e-3, 1e-4};

  std::string out_path;  // empty: stdout
  OutputFormat format = OutputFormat::csv;

  void validate() const {
    if (mode == StudyMode::order_study) {
      if (n_ladder.size() < 3) {
        throw ConfigError("order study needs a ladder of at least 3 resolutions");
      }
      for (std::size_t i = 0; i + 1 < n_ladder.size(); ++i) {
        if (n_ladder[i + 1] != 2 * n_ladder[i]) {
          throw ConfigError(
              "resolution ladder entries must double (direct-injection "
              "coarsening requires nested grids)");
        }
      }
    }
    if (mode == StudyMode::region_scan && scan_resolution < 2) {
      throw ConfigError("region scan resolution must be >= 2");
    }
    if (mode == StudyMode::limit_check) {
      if (dx_ladder.empty()) throw ConfigError("limit check needs a dx ladder");
      for (std::size_t i = 0; i + 1 < dx_ladder.size(); ++i) {
        if (!(dx_ladder[i] > dx_ladder[i + 1])) {
          throw ConfigError("dx ladder must be strictly decreasing");
        }
      }
    }
  }
};

namespace detail {

inline double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  }
}

inline int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  }
}

template <class T, class Parse>
std::vector<T> to_list(const std::string& key, const std::string& value, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("config key '" + key + "': empty list item");
    out.push_back(parse(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses the flat `key = value` config format (one pair per line, '#'
/// comments). Unknown keys are rejected so typos surface immediately.
inline StudyConfig parse_config_text(std::istream& in) {
  StudyConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    }

    if (key == "mode") {
      const auto m = parse_mode(value);
      if (!m) throw ConfigError("unknown mode '" + value + "'");
      cfg.mode = *m;
    } else if (key == "a") {
      cfg.pde.advection_speed = detail::to_double(key, value);
      cfg.scan_a = cfg.pde.advection_speed;
    } else if (key == "d") {
      cfg.pde.diffusivity = detail::to_double(key, value);
    } else if (key == "r") {
      cfg.pde.reaction_rate = detail::to_double(key, value);
    } else if (key == "n") {
      cfg.pde.resolution = detail::to_int(key, value);
    } else if (key == "n_ladder") {
      cfg.n_ladder = detail::to_list<int>(key, value, detail::to_int);
    } else if (key == "cfl") {
      cfg.pde.cfl = detail::to_double(key, value);
    } else if (key == "K") {
      cfg.pde.sweep_count = detail::to_int(key, value);
    } else if (key == "nodes") {
      cfg.pde.node_count = detail::to_int(key, value);
    } else if (key == "t_final") {
      cfg.pde.final_time = detail::to_double(key, value);
    } else if (key == "scan_a") {
      cfg.scan_a = detail::to_double(key, value);
    } else if (key == "d_dt_min") {
      cfg.d_dt_min = detail::to_double(key, value);
    } else if (key == "d_dt_max") {
      cfg.d_dt_max = detail::to_double(key, value);
    } else if (key == "r_dt_min") {
      cfg.r_dt_min = detail::to_double(key, value);
    } else if (key == "r_dt_max") {
      cfg.r_dt_max = detail::to_double(key, value);
    } else if (key == "scan_resolution") {
      cfg.scan_resolution = detail::to_int(key, value);
    } else if (key == "a_tilde") {
      cfg.a_tilde = detail::to_double(key, value);
    } else if (key == "d_tilde") {
      cfg.d_tilde = detail::to_double(key, value);
    } else if (key == "lambda") {
      cfg.lambda = detail::to_double(key, value);
    } else if (key == "dx_ladder") {
      cfg.dx_ladder = detail::to_list<double>(key, value, detail::to_double);
    } else if (key == "out") {
      cfg.out_path = value;
    } else if (key == "format") {
      if (value == "csv") cfg.format = OutputFormat::csv;
      else if (value == "json") cfg.format = OutputFormat::json;
      else throw ConfigError("unknown format '" + value + "'");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

inline StudyConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config_text(in);
}

/// L1 distance between a coarse solution and a coarsened fine solution with
/// exactly twice the resolution.
inline double l1_error(std::span<const double> coarse,
                       std::span<const double> fine, CoarseningMode mode) {
  if (fine.size() != 2 * coarse.size() || coarse.empty()) {
    throw std::invalid_argument("l1_error: fine resolution must be exactly twice the coarse");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double f = mode == CoarseningMode::direct_injection
                         ? fine[2 * i]
                         : 0.5 * (fine[2 * i] + fine[2 * i + 1]);
    acc += std::abs(coarse[i] - f);
  }
  return acc / static_cast<double>(coarse.size());
}

/// log2 of the error ratio between a resolution and its 2x refinement.
inline double observed_order(double coarse_error, double fine_error) {
  return std::log2(coarse_error / fine_error);
}

/// Runs `count` tasks with at most MISDC_THREADS workers (default: hardware
/// concurrency). Results are written into index-addressed slots by the
/// callers, so the outcome does not depend on the interleaving.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MISDC_THREADS")) {
    try {
      cap = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError("MISDC_THREADS is not an integer");
    }
  }
  cap = std::max(1, std::min(cap, count));
  if (cap == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  workers.reserve(cap);
  for (int w = 0; w < cap; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < count; i += cap) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (int i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

/// Per-resolution errors and pairwise observed orders of a ladder study.
/// The last ladder entry serves as the reference and carries no error; the
/// first error row carries no rate. Undefined ratios come out NaN.
struct ConvergenceReport {
  struct Row {
    int n = 0;
    double dt = 0.0;
    double l1 = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
  };
  std::vector<Row> rows;
  int sweep_count = 0;
  int node_count = 0;
  double cfl = 0.0;
  double total_wall_seconds = 0.0;
};

inline ConvergenceReport run_order_study(const StudyConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int count = static_cast<int>(cfg.n_ladder.size());
  std::vector<State> solutions(count);
  std::vector<double> wall(count, 0.0);

  try {
    parallel_for(count, [&](int i) {
      pde::TestPdeConfig pc = cfg.pde;
      pc.resolution = cfg.n_ladder[i];
      const auto s0 = std::chrono::steady_clock::now();
      solutions[i] = pde::TestPdeProblem(pc).solve().state;
      wall[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
    });
  } catch (const std::exception& e) {
    std::throw_with_nested(
        Error(std::string("order study aborted; partial results discarded: ") + e.what()));
  }

  ConvergenceReport report;
  report.sweep_count = cfg.pde.sweep_count;
  report.node_count = cfg.pde.node_count;
  report.cfl = cfg.pde.cfl;
  const double length = cfg.pde.x_hi - cfg.pde.x_lo;
  for (int i = 0; i < count; ++i) {
    ConvergenceReport::Row row;
    row.n = cfg.n_ladder[i];
    row.dt = cfg.pde.cfl * length / cfg.n_ladder[i];
    row.wall_seconds = wall[i];
    if (i + 1 < count) {
      row.l1 = l1_error(solutions[i], solutions[i + 1],
                        CoarseningMode::direct_injection);
      if (i > 0) row.rate = observed_order(report.rows[i - 1].l1, row.l1);
    }
    report.rows.push_back(row);
  }
  report.total_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Matched scans of the current method and the legacy method over the same
/// (d dt, r dt) grid.
struct RegionScanPair {
  analysis::RegionScan misdc;
  analysis::RegionScan legacy;
};

inline RegionScanPair run_region_scan(const StudyConfig& cfg) {
  cfg.validate();
  RegionScanPair pair{
      analysis::scan_region(analysis::Method::misdc, cfg.scan_a, cfg.d_dt_min,
                            cfg.d_dt_max, cfg.r_dt_min, cfg.r_dt_max,
                            cfg.scan_resolution),
      analysis::scan_region(analysis::Method::legacy, cfg.scan_a, cfg.d_dt_min,
                            cfg.d_dt_max, cfg.r_dt_min, cfg.r_dt_max,
                            cfg.scan_resolution)};
  return pair;
}

inline analysis::LimitReport run_limit_check(const StudyConfig& cfg) {
  cfg.validate();
  return analysis::limit_check(cfg.a_tilde, cfg.d_tilde, cfg.pde.reaction_rate,
                               cfg.lambda, cfg.dx_ladder);
}

inline pde::SolveResult run_single(const StudyConfig& cfg) {
  cfg.validate();
  return pde::TestPdeProblem(cfg.pde).solve();
}

// ---------------------------------------------------------------------------
// emission

namespace detail {

/// 17 significant digits: enough to reproduce any double bit-exactly.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_csv(const ConvergenceReport& r, std::ostream& out) {
  out << "n,dt,l1_error,rate,wall_seconds\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << detail::fmt(row.dt) << ',' << detail::fmt(row.l1)
        << ',' << detail::fmt(row.rate) << ',' << detail::fmt(row.wall_seconds)
        << '\n';
  }
}

inline void write_csv(const RegionScanPair& pair, std::ostream& out) {
  out << "method,d_dt,r_dt,theta,converged\n";
  for (const analysis::RegionScan* scan : {&pair.misdc, &pair.legacy}) {
    const int res = static_cast<int>(scan->d_dt_axis.size());
    for (int di = 0; di < res; ++di) {
      for (int ri = 0; ri < res; ++ri) {
        const int idx = scan->index(di, ri);
        out << analysis::method_name(scan->method) << ','
            << detail::fmt(scan->d_dt_axis[di]) << ','
            << detail::fmt(scan->r_dt_axis[ri]) << ','
            << detail::fmt(scan->theta[idx]) << ','
            << int(scan->converged[idx]) << '\n';
      }
    }
  }
}

inline void write_csv(const analysis::LimitReport& r, std::ostream& out) {
  out << "dx,alpha,beta,gamma,delta,theta\n";
  for (const auto& p : r.points) {
    out << detail::fmt(p.dx) << ',' << detail::fmt(p.alpha) << ','
        << detail::fmt(p.beta) << ',' << detail::fmt(p.gamma) << ','
        << detail::fmt(p.delta) << ',' << detail::fmt(p.theta) << '\n';
  }
}

inline void write_csv(const pde::SolveResult& r, const StudyConfig& cfg,
                      std::ostream& out) {
  out << "x,phi\n";
  const double dx = (cfg.pde.x_hi - cfg.pde.x_lo) / cfg.pde.resolution;
  for (std::size_t i = 0; i < r.state.size(); ++i) {
    out << detail::fmt(cfg.pde.x_lo + i * dx) << ',' << detail::fmt(r.state[i])
        << '\n';
  }
}

inline void write_json(const ConvergenceReport& r, std::ostream& out) {
  nlohmann::json j;
  j["mode"] = "order-study";
  j["metadata"] = {{"K", r.sweep_count},
                   {"nodes", r.node_count},
                   {"cfl", r.cfl},
                   {"total_wall_seconds", r.total_wall_seconds}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"dt", row.dt},
                         {"l1_error", row.l1},
                         {"rate", row.rate},
                         {"wall_seconds", row.wall_seconds}});
  }
  out << j.dump(2) << '\n';
}

inline void write_json(const RegionScanPair& pair, std::ostream& out) {
  nlohmann::json j;
  j["mode"] = "region-scan";
  j["rows"] = nlohmann::json::array();
  for (const analysis::RegionScan* scan : {&pair.misdc, &pair.legacy}) {
    const int res = static_cast<int>(scan->d_dt_axis.size());
    for (int di = 0; di < res; ++di) {
      for (int ri = 0; ri < res; ++ri) {
        const int idx = scan->index(di, ri);
        j["rows"].push_back({{"method", analysis::method_name(scan->method)},
                             {"d_dt", scan->d_dt_axis[di]},
                             {"r_dt", scan->r_dt_axis[ri]},
                             {"theta", scan->theta[idx]},
                             {"converged", bool(scan->converged[idx])}});
      }
    }
  }
  out << j.dump(2) << '\n';
}

inline void write_json(const analysis::LimitReport& r, std::ostream& out) {
  nlohmann::json j;
  j["mode"] = "limit-check";
  j["parameters"] = {{"a_tilde", r.a_tilde},
                     {"d_tilde", r.d_tilde},
                     {"r", r.r},
                     {"lambda", r.lambda}};
  j["rows"] = nlohmann::json::array();
  for (const auto& p : r.points) {
    j["rows"].push_back({{"dx", p.dx},
                         {"alpha", p.alpha},
                         {"beta", p.beta},
                         {"gamma", p.gamma},
                         {"delta", p.delta},
                         {"theta", p.theta}});
  }
  out << j.dump(2) << '\n';
}

inline void write_json(const pde::SolveResult& r, const StudyConfig& cfg,
                       std::ostream& out) {
  nlohmann::json j;
  j["mode"] = "single-run";
  j["config"] = {{"a", cfg.pde.advection_speed},
                 {"d", cfg.pde.diffusivity},
                 {"r", cfg.pde.reaction_rate},
                 {"n", cfg.pde.resolution},
                 {"cfl", cfg.pde.cfl},
                 {"K", cfg.pde.sweep_count},
                 {"nodes", cfg.pde.node_count},
                 {"t_final", cfg.pde.final_time}};
  const double dx = (cfg.pde.x_hi - cfg.pde.x_lo) / cfg.pde.resolution;
  auto& xs = j["x"] = nlohmann::json::array();
  auto& phis = j["phi"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.state.size(); ++i) {
    xs.push_back(cfg.pde.x_lo + i * dx);
    phis.push_back(r.state[i]);
  }
  auto& steps = j["steps"] = nlohmann::json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"step", s.step},
                     {"time", s.time},
                     {"newton_iterations_max", s.newton_iterations_max},
                     {"newton_residual_max", s.newton_residual_max},
                     {"state_min", s.state_min},
                     {"state_max", s.state_max}});
  }
  out << j.dump(2) << '\n';
}

/// Runs the configured study and writes the result in the configured format.
inline void run_study(const StudyConfig& cfg, std::ostream& out) {
  switch (cfg.mode) {
    case StudyMode::order_study: {
      const ConvergenceReport r = run_order_study(cfg);
      cfg.format == OutputFormat::csv ? write_csv(r, out) : write_json(r, out);
      return;
    }
    case StudyMode::region_scan: {
      const RegionScanPair r = run_region_scan(cfg);
      cfg.format == OutputFormat::csv ? write_csv(r, out) : write_json(r, out);
      return;
    }
    case StudyMode::limit_check: {
      const analysis::LimitReport r = run_limit_check(cfg);
      cfg.format == OutputFormat::csv ? write_csv(r, out) : write_json(r, out);
      return;
    }
    case StudyMode::single_run: {
      const pde::SolveResult r = run_single(cfg);
      cfg.format == OutputFormat::csv ? write_csv(r, cfg, out)
                                      : write_json(r, cfg, out);
      return;
    }
  }
}

}  // namespace misdc::harness
