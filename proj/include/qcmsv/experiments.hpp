// Copyright 2026 The qcmsv Authors.
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

// Desk-scale experiment drivers. Each run writes <name>.csv (one row per
// configuration point) and <name>.json with {"config", "results",
// "caveats", "summary"}. Both files depend only on the effective config, so
// reruns are byte-identical; wall-clock time goes to an optional
// <name>.timing.json.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcmsv/bounds.hpp"
#include "qcmsv/cmsv.hpp"
#include "qcmsv/ensembles.hpp"
#include "qcmsv/io.hpp"
#include "qcmsv/nsp.hpp"
#include "qcmsv/parallel.hpp"
#include "qcmsv/random.hpp"
#include "qcmsv/ric.hpp"

namespace qcmsv {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentName { Fig1Hist, Table1, Table2, Fig2CmsvVsS, Fig3CmsvVsM, Fig4CmsvVsQ, Fig5Bounds };

inline const std::vector<std::pair<ExperimentName, std::string>>& experiment_names() {
  static const std::vector<std::pair<ExperimentName, std::string>> names = {
      {ExperimentName::Fig1Hist, "fig1_hist"},
      {ExperimentName::Table1, "table1"},
      {ExperimentName::Table2, "table2"},
      {ExperimentName::Fig2CmsvVsS, "fig2_cmsv_vs_s"},
      {ExperimentName::Fig3CmsvVsM, "fig3_cmsv_vs_m"},
      {ExperimentName::Fig4CmsvVsQ, "fig4_cmsv_vs_q"},
      {ExperimentName::Fig5Bounds, "fig5_bounds"},
  };
  return names;
}

inline std::string to_string(ExperimentName n) {
  for (const auto& [k, v] : experiment_names()) {
    if (k == n) return v;
  }
  return "unknown";
}

inline ExperimentName parse_experiment_name(const std::string& s) {
  for (const auto& [k, v] : experiment_names()) {
    if (v == s) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment '" + s + "'");
}

struct ExperimentConfig {
  ExperimentName name = ExperimentName::Fig1Hist;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  unsigned threads = 1;
  bool record_timing = false;

  // Overrides; unset fields take the per-experiment defaults.
  std::optional<int> trials;       // matrices / draws / seeds
  std::optional<int> restarts;     // CMSV multi-start count
  std::optional<int> ric_samples;  // fig5 only
  std::optional<Eigen::Index> n;
  std::optional<std::vector<Eigen::Index>> m_list;
  std::optional<std::vector<double>> s_list;
  std::optional<std::vector<QParam>> q_list;
  std::optional<std::vector<std::int64_t>> k_list;
  bool full_grid = false;  // table2: every m of the original grid
};

struct ExperimentManifest {
  std::vector<std::string> files;
  nlohmann::json document;
  double seconds = 0.0;
};

namespace detail {

using nlohmann::json;

// Rows of JSON scalars, written both as CSV and as an array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void write_csv(std::ostream& out) const {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out << ',';
        const json& v = row[j];
        if (v.is_null()) out << "NA";
        else if (v.is_number_float()) out << io::format_double(v.get<double>());
        else if (v.is_string()) out << v.get<std::string>();
        else out << v.dump();
      }
      out << '\n';
    }
  }

  json as_objects() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t j = 0; j < columns.size(); ++j) obj[columns[j]] = row[j];
      arr.push_back(obj);
    }
    return arr;
  }
};

inline std::uint64_t draw_seed(std::uint64_t seed, std::uint64_t draw) {
  return derive_seed(seed, {static_cast<std::uint64_t>(StreamTag::Experiment), draw});
}

inline json q_json(const QParam& q) {
  if (q.is_infinity()) return "inf";
  return q.value();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline void require_positive(const std::optional<int>& v, const char* what) {
  if (v) require(*v >= 1, ErrorCode::InvalidArgument, std::string(what) + " must be >= 1");
}

inline CmsvEstimate cmsv_point(const MeasurementMatrix& a, const QParam& q, double s, int restarts,
                               std::uint64_t seed) {
  CmsvRequest req;
  req.a = a;
  req.q = q;
  req.s = s;
  req.restarts = restarts;
  req.seed = seed;
  return estimate_cmsv(req);
}

struct Outcome {
  json config;
  Table table;
  json summary = json::object();
  std::vector<std::string> caveats;
};

inline const char* kCmsvCaveat =
    "rho values are UPPER_BOUND estimates: best of a multi-start local search";

// ---- fig1_hist -----------------------------------------------------------

inline Outcome run_fig1(const ExperimentConfig& cfg) {
  const int trials = cfg.trials.value_or(100);
  const int restarts = cfg.restarts.value_or(30);
  const Eigen::Index n = cfg.n.value_or(60);
  const Eigen::Index m = cfg.m_list ? cfg.m_list->front() : 40;
  const double s = cfg.s_list ? cfg.s_list->front() : 4.0;
  const auto qs = cfg.q_list.value_or(
      std::vector<QParam>{QParam::finite(1.8), QParam::finite(2.0), QParam::finite(3.0)});

  Outcome out;
  out.config = {{"trials", trials}, {"restarts", restarts}, {"m", m},  {"n", n},
                {"s", s},           {"ensemble", "gaussian"}, {"scale", 1.0 / std::sqrt(static_cast<double>(m))}};
  out.config["q"] = json::array();
  for (const auto& q : qs) out.config["q"].push_back(q_json(q));

  const std::size_t points = static_cast<std::size_t>(trials) * qs.size();
  std::vector<CmsvEstimate> est(points);
  parallel_for(points, cfg.threads, [&](std::size_t p) {
    const std::size_t t = p / qs.size();
    const auto a = generate({.kind = EnsembleTag::Gaussian, .m = m, .n = n, .seed = draw_seed(cfg.seed, t)});
    est[p] = cmsv_point(a, qs[p % qs.size()], s, restarts, draw_seed(cfg.seed, t));
  });
  out.table.columns = {"matrix", "q", "s", "rho", "stationarity"};
  std::map<std::size_t, std::vector<double>> by_q;
  for (std::size_t p = 0; p < points; ++p) {
    out.table.rows.push_back({p / qs.size(), q_json(qs[p % qs.size()]), s, est[p].value, est[p].stationarity});
    by_q[p % qs.size()].push_back(est[p].value);
  }
  out.summary["histograms"] = json::array();
  for (const auto& [qi, vals] : by_q) {
    const double hi = *std::max_element(vals.begin(), vals.end());
    const double lo = *std::min_element(vals.begin(), vals.end());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    const int bins = 20;
    std::vector<int> counts(bins, 0);
    const double width = hi > 0.0 ? hi / bins : 1.0;
    for (double v : vals) counts[std::min(bins - 1, static_cast<int>(v / width))]++;
    out.summary["histograms"].push_back({{"q", q_json(qs[qi])}, {"count", vals.size()}, {"mean", mean},
                                         {"min", lo}, {"max", hi}, {"bin_width", width},
                                         {"counts", counts}});
  }
  out.caveats.emplace_back(kCmsvCaveat);
  return out;
}

// ---- table1 / table2 -----------------------------------------------------

struct SparsityMethod {
  std::string label;
  QParam q;
};

inline std::vector<SparsityMethod> default_methods() {
  return {{"linf", QParam::infinity()},
          {"ccp_1.8", QParam::finite(1.8)},
          {"ccp_2", QParam::finite(2.0)},
          {"ccp_3", QParam::finite(3.0)},
          {"ccp_20", QParam::finite(20.0)}};
}

inline Outcome run_sparsity_table(const ExperimentConfig& cfg, bool large) {
  const int trials = cfg.trials.value_or(large ? 5 : 20);
  const Eigen::Index n = cfg.n.value_or(large ? 256 : 40);
  std::vector<Eigen::Index> ms;
  if (cfg.m_list) {
    ms = *cfg.m_list;
  } else if (large) {
    ms = cfg.full_grid ? std::vector<Eigen::Index>{25, 51, 76, 102, 128, 153, 179, 204, 230}
                       : std::vector<Eigen::Index>{51, 128, 204};
  } else {
    ms = {20, 24, 28, 32};
  }
  std::vector<SparsityMethod> methods = default_methods();
  if (cfg.q_list) {
    methods = {{"linf", QParam::infinity()}};
    for (const auto& q : *cfg.q_list) {
      if (!q.is_infinity()) methods.push_back({"ccp_" + q.to_string(), q});
    }
  }
  const EnsembleTag tag = large ? EnsembleTag::Gaussian : EnsembleTag::Bernoulli;

  Outcome out;
  out.config = {{"trials", trials}, {"n", n}, {"m", ms}, {"ensemble", std::string(to_string(tag))},
                {"nested_row_prefix", true}, {"full_grid", cfg.full_grid}};
  out.config["methods"] = json::array();
  for (const auto& me : methods) out.config["methods"].push_back(me.label);

  struct Cell {
    std::vector<VerificationResult> results;
  };
  const std::size_t units = static_cast<std::size_t>(trials) * ms.size();
  std::vector<Cell> cells(units);
  // One unit is a (draw, m) pair: the linf witness seeds every CCP run.
  parallel_for(units, cfg.threads, [&](std::size_t u) {
    const std::size_t t = u / ms.size();
    EnsembleSpec spec{.kind = tag, .m = ms.back(), .n = n, .seed = draw_seed(cfg.seed, t)};
    const auto mats = nested_row_prefix(spec, ms);
    const auto& a = mats[u % ms.size()];
    VerifyOptions opt;
    opt.seed = draw_seed(cfg.seed, t);
    const auto linf = verify_linf(a, opt);
    cells[u].results.push_back(linf);
    for (std::size_t k = 1; k < methods.size(); ++k) {
      cells[u].results.push_back(ccp_verify(a, methods[k].q, linf.witness, opt));
    }
  });
  out.table.columns = {"draw", "m", "method", "opt_value", "k_max", "certificate"};
  std::map<std::pair<Eigen::Index, std::size_t>, std::vector<double>> levels;
  for (std::size_t u = 0; u < units; ++u) {
    const Eigen::Index m = ms[u % ms.size()];
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const auto& r = cells[u].results[k];
      out.table.rows.push_back({u / ms.size(), m, methods[k].label, r.opt_value, r.k_max,
                                std::string(to_string(r.certificate))});
      levels[{m, k}].push_back(static_cast<double>(r.k_max));
    }
  }
  out.summary["median_k_max"] = json::array();
  for (const Eigen::Index m : ms) {
    json row = {{"m", m}};
    for (std::size_t k = 0; k < methods.size(); ++k) row[methods[k].label] = median(levels[{m, k}]);
    out.summary["median_k_max"].push_back(row);
  }
  out.caveats.emplace_back("linf levels are EXACT; ccp levels are HEURISTIC_UPPER (local optimum of a nonconvex maximization)");
  if (large && !cfg.full_grid && !cfg.m_list) {
    out.caveats.emplace_back("reduced m grid {51, 128, 204}; pass --full-grid for all nine values");
  }
  return out;
}

// ---- fig2 / fig3 / fig4 --------------------------------------------------

inline Outcome run_cmsv_sweep(const ExperimentConfig& cfg, ExperimentName which) {
  const int trials = cfg.trials.value_or(1);
  const int restarts = cfg.restarts.value_or(30);
  const Eigen::Index n = cfg.n.value_or(60);
  std::vector<Eigen::Index> ms;
  std::vector<double> ss;
  std::vector<QParam> qs;
  const std::vector<QParam> three = {QParam::finite(1.8), QParam::finite(2.0), QParam::finite(3.0)};
  switch (which) {
    case ExperimentName::Fig2CmsvVsS:
      ms = {20, 30, 40};
      ss = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      qs = three;
      break;
    case ExperimentName::Fig3CmsvVsM:
      for (Eigen::Index m = 20; m <= 40; m += 2) ms.push_back(m);
      ss = {4, 6, 8};
      qs = three;
      break;
    default:
      ms = {20, 30, 40};
      ss = {2, 4, 8};
      for (double q : {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0}) qs.push_back(QParam::finite(q));
      break;
  }
  if (cfg.m_list) ms = *cfg.m_list;
  if (cfg.s_list) ss = *cfg.s_list;
  if (cfg.q_list) qs = *cfg.q_list;

  Outcome out;
  out.config = {{"trials", trials}, {"restarts", restarts}, {"n", n}, {"m", ms}, {"s", ss},
                {"ensemble", "bernoulli"}, {"nested_row_prefix", true}, {"normalize_columns", true}};
  out.config["q"] = json::array();
  for (const auto& q : qs) out.config["q"].push_back(q_json(q));

  const std::size_t per_draw = ms.size() * qs.size() * ss.size();
  const std::size_t points = static_cast<std::size_t>(trials) * per_draw;
  std::vector<CmsvEstimate> est(points);
  parallel_for(points, cfg.threads, [&](std::size_t p) {
    const std::size_t t = p / per_draw;
    const std::size_t r = p % per_draw;
    const std::size_t mi = r / (qs.size() * ss.size());
    const std::size_t qi = (r / ss.size()) % qs.size();
    const std::size_t si = r % ss.size();
    EnsembleSpec spec{.kind = EnsembleTag::Bernoulli, .m = ms.back(), .n = n, .seed = draw_seed(cfg.seed, t)};
    spec.normalize_columns = true;
    const auto mats = nested_row_prefix(spec, ms);
    est[p] = cmsv_point(mats[mi], qs[qi], ss[si], restarts, draw_seed(cfg.seed, t));
  });
  out.table.columns = {"draw", "m", "q", "s", "rho"};
  for (std::size_t p = 0; p < points; ++p) {
    const std::size_t r = p % per_draw;
    out.table.rows.push_back({p / per_draw, ms[r / (qs.size() * ss.size())],
                              q_json(qs[(r / ss.size()) % qs.size()]), ss[r % ss.size()], est[p].value});
  }
  out.caveats.emplace_back(kCmsvCaveat);
  return out;
}

// ---- fig5_bounds ---------------------------------------------------------

inline Outcome run_fig5(const ExperimentConfig& cfg) {
  const int trials = cfg.trials.value_or(1);
  const int restarts = cfg.restarts.value_or(30);
  const int samples = cfg.ric_samples.value_or(1000);
  const Eigen::Index n = cfg.n.value_or(64);
  const auto ks = cfg.k_list.value_or(std::vector<std::int64_t>{1, 2, 4});
  const auto extra = cfg.m_list.value_or(std::vector<Eigen::Index>{16, 24, 32, 40, 48, 56, 64});
  const QParam q = cfg.q_list ? cfg.q_list->front() : QParam::finite(1.8);
  require(q.is_finite() && q.value() > 1.0 && q.value() <= 2.0, ErrorCode::InvalidQ,
          "fig5 compares against the RIC bound, which needs q in (1, 2]");
  const double eps = 1.0;

  // m grid per k: 10k, then every listed m above it, capped at N.
  std::vector<std::pair<std::int64_t, Eigen::Index>> grid;
  Eigen::Index m_max = 1;
  for (const auto k : ks) {
    require(k >= 1 && 10 * k <= n, ErrorCode::InvalidArgument, "fig5 needs 1 <= 10k <= N");
    grid.emplace_back(k, 10 * k);
    for (const Eigen::Index m : extra) {
      if (m > 10 * k && m <= n) grid.emplace_back(k, m);
    }
  }
  std::vector<Eigen::Index> all_m;
  for (const auto& [k, m] : grid) all_m.push_back(m);
  std::sort(all_m.begin(), all_m.end());
  all_m.erase(std::unique(all_m.begin(), all_m.end()), all_m.end());
  m_max = all_m.back();

  Outcome out;
  out.config = {{"trials", trials}, {"restarts", restarts}, {"ric_samples", samples}, {"n", n},
                {"k", ks},          {"q", q_json(q)},       {"eps", eps},
                {"ensemble", "hadamard_sub"}, {"m_grid", "10k then listed m above 10k"}, {"m_list", extra}};

  struct Cell {
    double s = 0.0;
    double rho = 0.0;
    std::optional<double> cmsv_bound;
    RicEstimate ric;
    std::optional<double> ric_bound;
  };
  const std::size_t points = static_cast<std::size_t>(trials) * grid.size();
  std::vector<Cell> cells(points);
  parallel_for(points, cfg.threads, [&](std::size_t p) {
    const std::size_t t = p / grid.size();
    const auto [k, m] = grid[p % grid.size()];
    EnsembleSpec spec{.kind = EnsembleTag::HadamardSub, .m = m_max, .n = n, .seed = draw_seed(cfg.seed, t)};
    // Every m of a trial is a row prefix of the same shuffled Hadamard.
    const MeasurementMatrix a = nested_row_prefix(spec, {m}).front();
    Cell& c = cells[p];
    const NoiseModel noise = NoiseModel::l2_ball(eps);
    c.s = cmsv_s_for(BoundRegime::ExactSparse, noise, k, q, n);
    const auto rho = cmsv_point(a, q, c.s, restarts, draw_seed(cfg.seed, t));
    c.rho = rho.value;
    if (rho.value > 0.0) c.cmsv_bound = bound_theorem1(rho, k, q, noise).bound_lq;
    c.ric = estimate_ric(a, k, samples, draw_seed(cfg.seed, t));
    c.ric_bound = ric_bound(c.ric.delta, k, q.value(), eps);
  });
  out.table.columns = {"trial", "k", "m", "s", "rho", "cmsv_bound", "delta", "ric_bound", "ric_degenerate"};
  auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (std::size_t p = 0; p < points; ++p) {
    const auto [k, m] = grid[p % grid.size()];
    const Cell& c = cells[p];
    out.table.rows.push_back({p / grid.size(), k, m, c.s, c.rho, opt_json(c.cmsv_bound), c.ric.delta,
                              opt_json(c.ric_bound), c.ric.degenerate});
  }
  out.caveats.emplace_back(kCmsvCaveat);
  out.caveats.emplace_back(
      "delta values are LOWER_BOUND Monte Carlo estimates, so RIC bounds are optimistic");
  out.caveats.emplace_back("NA marks a bound that does not apply (rho = 0 or delta >= sqrt(2) - 1)");
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  f << text;
  require(static_cast<bool>(f), ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace detail

inline ExperimentManifest run_experiment(const ExperimentConfig& cfg) {
  detail::require_positive(cfg.trials, "trials");
  detail::require_positive(cfg.restarts, "restarts");
  detail::require_positive(cfg.ric_samples, "ric_samples");
  if (cfg.n) require(*cfg.n >= 2, ErrorCode::InvalidArgument, "N must be >= 2");
  if (cfg.m_list) {
    require(!cfg.m_list->empty() && std::is_sorted(cfg.m_list->begin(), cfg.m_list->end()) &&
                cfg.m_list->front() >= 1,
            ErrorCode::InvalidArgument, "m list must be non-empty, positive and increasing");
  }
  if (cfg.s_list) require(!cfg.s_list->empty(), ErrorCode::InvalidArgument, "empty s list");
  if (cfg.q_list) require(!cfg.q_list->empty(), ErrorCode::InvalidArgument, "empty q list");
  if (cfg.k_list) require(!cfg.k_list->empty(), ErrorCode::InvalidArgument, "empty k list");

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(fs::is_directory(dir), ErrorCode::Io, "cannot create output directory '" + cfg.output_dir + "'");

  const auto start = std::chrono::steady_clock::now();
  detail::Outcome out;
  const std::string name = to_string(cfg.name);
  try {
    switch (cfg.name) {
      case ExperimentName::Fig1Hist: out = detail::run_fig1(cfg); break;
      case ExperimentName::Table1: out = detail::run_sparsity_table(cfg, false); break;
      case ExperimentName::Table2: out = detail::run_sparsity_table(cfg, true); break;
      case ExperimentName::Fig2CmsvVsS:
      case ExperimentName::Fig3CmsvVsM:
      case ExperimentName::Fig4CmsvVsQ: out = detail::run_cmsv_sweep(cfg, cfg.name); break;
      case ExperimentName::Fig5Bounds: out = detail::run_fig5(cfg); break;
    }
  } catch (const Error& e) {
    throw Error(e.code(), "experiment " + name + ": " + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.config["name"] = name;
  out.config["seed"] = cfg.seed;
  out.config["version"] = kVersion;
  out.config["rng"] = "mt19937_64 streams keyed by SplitMix64(seed, tag, index)";

  ExperimentManifest man;
  man.document = {{"config", out.config},
                  {"results", out.table.as_objects()},
                  {"caveats", out.caveats},
                  {"summary", out.summary}};
  man.seconds = seconds;
  std::ostringstream csv;
  out.table.write_csv(csv);
  const fs::path csv_path = dir / (name + ".csv");
  const fs::path json_path = dir / (name + ".json");
  detail::write_text(csv_path, csv.str());
  detail::write_text(json_path, man.document.dump(2) + "\n");
  man.files = {csv_path.string(), json_path.string()};
  if (cfg.record_timing) {
    const fs::path timing = dir / (name + ".timing.json");
    nlohmann::json t = {{"name", name}, {"wall_clock_seconds", seconds}, {"threads", cfg.threads}};
    detail::write_text(timing, t.dump(2) + "\n");
    man.files.push_back(timing.string());
  }
  return man;
}

}  // namespace qcmsv
