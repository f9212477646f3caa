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

// The qcmsv command line. Kept in a header so the tests can drive it
// in-process. Exit codes: 0 success, 1 computation error, 2 usage error.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcmsv/qcmsv.hpp"

namespace qcmsv::cli {

using nlohmann::json;

inline std::string human(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json q_json(const QParam& q) {
  if (q.is_infinity()) return "inf";
  return q.value();
}

// CLI11 validator: accepts anything parse_q accepts.
inline const CLI::Validator kQValidator(
    [](std::string& s) -> std::string {
      try {
        parse_q(s);
      } catch (const Error& e) {
        return e.what();
      }
      return {};
    },
    "Q", "q order");

inline void print_fields(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& [k, v] : rows) out << k << std::string(w - k.size() + 2, ' ') << v << '\n';
}

inline MeasurementMatrix load_matrix(const std::string& path, bool normalize) {
  MeasurementMatrix a(io::read_matrix(path));
  return normalize ? a.normalized() : a;
}

struct Globals {
  std::uint64_t seed = 0;
  bool json_out = false;
  unsigned threads = 1;
};

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-ratio sparsity, constrained minimal singular values and sparse recovery"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base seed for every random stream")->capture_default_str();
  app.add_flag("--json", g.json_out, "Machine-readable JSON output");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::function<void()> action;

  // gen-matrix
  auto* gen = app.add_subcommand("gen-matrix", "Draw a random measurement matrix");
  std::string ensemble;
  Eigen::Index gm = 0, gn = 0;
  std::optional<double> gscale;
  std::optional<std::uint64_t> grow;
  bool gnorm = false;
  std::string gout;
  gen->add_option("--ensemble", ensemble, "gaussian | bernoulli | hadamard")
      ->required()
      ->check(CLI::IsMember({"gaussian", "bernoulli", "hadamard"}));
  gen->add_option("-m,--m", gm, "Rows")->required()->check(CLI::PositiveNumber);
  gen->add_option("-n,--n", gn, "Columns")->required()->check(CLI::PositiveNumber);
  gen->add_option("--scale", gscale, "Entry scale (default 1/sqrt(m))")->check(CLI::PositiveNumber);
  gen->add_option("--row-seed", grow, "Seed of the Hadamard row shuffle (default --seed)");
  gen->add_flag("--normalize", gnorm, "Scale columns to unit norm");
  gen->add_option("-o,--output", gout, "Output CSV (default stdout)");
  gen->callback([&] {
    action = [&] {
      EnsembleSpec spec;
      spec.kind = ensemble == "gaussian"    ? EnsembleTag::Gaussian
                  : ensemble == "bernoulli" ? EnsembleTag::Bernoulli
                                            : EnsembleTag::HadamardSub;
      spec.m = gm;
      spec.n = gn;
      spec.seed = g.seed;
      spec.scale = gscale;
      spec.row_permutation_seed = grow;
      spec.normalize_columns = gnorm;
      const auto a = generate(spec);
      if (!gout.empty()) io::write_matrix(gout, a.entries());
      if (g.json_out) {
        json j = {{"ensemble", ensemble}, {"m", gm}, {"n", gn}, {"seed", g.seed},
                  {"normalized", a.columns_normalized()}};
        if (gout.empty()) {
          j["entries"] = json::array();
          for (Eigen::Index i = 0; i < a.rows(); ++i) j["entries"].push_back(vec_json(a.entries().row(i).transpose()));
        } else {
          j["output"] = gout;
        }
        out << j.dump(2) << '\n';
      } else if (gout.empty()) {
        io::write_matrix(out, a.entries());
      } else {
        out << "wrote " << a.rows() << "x" << a.cols() << " matrix to " << gout << '\n';
      }
    };
  });

  // sparsity
  auto* sp = app.add_subcommand("sparsity", "q-ratio sparsity of a vector");
  std::string sq, sin;
  sp->add_option("--q", sq, "Order: 0, 1, inf or a positive real")->required()->check(kQValidator);
  sp->add_option("-i,--input", sin, "Vector CSV")->required();
  sp->callback([&] {
    action = [&] {
      const QParam q = parse_q(sq);
      const Vector v = io::read_vector(sin);
      const double s = q_ratio_sparsity(v, q);
      if (g.json_out) {
        out << json{{"q", q_json(q)}, {"sparsity", s}, {"n", v.size()}}.dump(2) << '\n';
      } else {
        out << human(s) << '\n';
      }
    };
  });

  // cmsv
  auto* cm = app.add_subcommand("cmsv", "Estimate the q-ratio CMSV rho_{q,s}(A)");
  std::string cmat, cq, cmin;
  double cs = 1.0;
  int crestarts = 30, citer = 5000;
  bool cnorm = false;
  cm->add_option("-a,--matrix", cmat, "Matrix CSV")->required();
  cm->add_option("--q", cq, "Order q > 1 or inf")->required()->check(kQValidator);
  cm->add_option("--s", cs, "Sparsity level s in [1, N]")->required();
  cm->add_option("--restarts", crestarts, "Multi-start trials")->capture_default_str()->check(CLI::PositiveNumber);
  cm->add_option("--max-iter", citer, "Iterations per trial")->capture_default_str()->check(CLI::PositiveNumber);
  cm->add_flag("--normalize", cnorm, "Normalize columns first");
  cm->add_option("--minimizer", cmin, "Write the minimizer to this CSV");
  cm->callback([&] {
    action = [&] {
      CmsvRequest req;
      req.a = load_matrix(cmat, cnorm);
      req.q = parse_q(cq);
      req.s = cs;
      req.restarts = crestarts;
      req.seed = g.seed;
      req.threads = g.threads;
      req.solver.max_iter = citer;
      const auto est = estimate_cmsv(req);
      if (!cmin.empty()) io::write_vector(cmin, est.minimizer);
      if (g.json_out) {
        out << json{{"rho", est.value},
                    {"q", q_json(est.q)},
                    {"s", est.s},
                    {"direction", std::string(to_string(est.direction))},
                    {"stationarity", est.stationarity},
                    {"trial_values", est.trial_values},
                    {"minimizer", vec_json(est.minimizer)}}
                   .dump(2)
            << '\n';
      } else {
        out << human(est.value) << '\n';
      }
    };
  });

  // verify
  auto* ve = app.add_subcommand("verify", "Certified sparsity level for noise-free basis pursuit");
  std::string vmat, vmethod = "linf", vq, vinit, vwit;
  int vccp_iter = 200, vccp_inits = 5;
  ve->add_option("-a,--matrix", vmat, "Matrix CSV")->required();
  ve->add_option("--method", vmethod, "linf | ccp")->capture_default_str()->check(CLI::IsMember({"linf", "ccp"}));
  ve->add_option("--q", vq, "Order for ccp (default 2)")->check(kQValidator);
  ve->add_option("--init", vinit, "CCP start vector CSV (default: linf witness)");
  ve->add_option("--ccp-max-iter", vccp_iter, "CCP iterations")->capture_default_str()->check(CLI::PositiveNumber);
  ve->add_option("--ccp-random-inits", vccp_inits, "Extra random CCP starts")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  ve->add_option("--witness", vwit, "Write the maximizing kernel vector to this CSV");
  ve->callback([&] {
    action = [&] {
      const MeasurementMatrix a(io::read_matrix(vmat));
      VerifyOptions opt;
      opt.seed = g.seed;
      opt.threads = g.threads;
      opt.ccp_max_iter = vccp_iter;
      opt.ccp_random_inits = vccp_inits;
      VerificationResult r;
      if (vmethod == "linf") {
        if (!vq.empty()) {
          require(parse_q(vq).is_infinity(), ErrorCode::InvalidQ, "--method linf certifies q = inf only");
        }
        r = verify_linf(a, opt);
      } else {
        const QParam q = vq.empty() ? QParam::finite(2.0) : parse_q(vq);
        std::optional<Vector> init;
        if (!vinit.empty()) init = io::read_vector(vinit);
        r = q.is_infinity() ? verify_linf(a, opt) : ccp_verify(a, q, init, opt);
      }
      if (!vwit.empty()) io::write_vector(vwit, r.witness);
      if (g.json_out) {
        out << json{{"method", vmethod},
                    {"q", q_json(r.q)},
                    {"opt_value", r.opt_value},
                    {"bound", std::isfinite(r.bound) ? json(r.bound) : json("inf")},
                    {"k_max", r.k_max},
                    {"certificate", std::string(to_string(r.certificate))},
                    {"iterations", r.trace.size()}}
                   .dump(2)
            << '\n';
      } else {
        print_fields(out, {{"k_max", std::to_string(r.k_max)},
                           {"opt_value", human(r.opt_value)},
                           {"bound", std::isfinite(r.bound) ? human(r.bound) : "inf"},
                           {"q", r.q.to_string()},
                           {"certificate", std::string(to_string(r.certificate))}});
      }
    };
  });

  // recover
  auto* rc = app.add_subcommand("recover", "Solve BP, the Dantzig selector or the Lasso");
  std::string rmat, ry, rprog = "bp", rout;
  double reps = 0.0, rlambda = 0.0;
  int riter = 50000;
  double rtol = 1e-8;
  rc->add_option("-a,--matrix", rmat, "Matrix CSV")->required();
  rc->add_option("-y,--measurements", ry, "Measurement vector CSV")->required();
  rc->add_option("--program", rprog, "bp | ds | lasso")->capture_default_str()->check(CLI::IsMember({"bp", "ds", "lasso"}));
  rc->add_option("--eps", reps, "l2 noise radius for bp")->capture_default_str()->check(CLI::NonNegativeNumber);
  rc->add_option("--lambda", rlambda, "lambda*sigma for ds and lasso")->capture_default_str()->check(CLI::NonNegativeNumber);
  rc->add_option("--max-iter", riter, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  rc->add_option("--tol", rtol, "Primal tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  rc->add_option("-o,--output", rout, "Write x_hat to this CSV");
  rc->callback([&] {
    action = [&] {
      const Matrix a = io::read_matrix(rmat);
      const Vector y = io::read_vector(ry);
      SolverConfig cfg;
      cfg.max_iter = riter;
      cfg.tol_primal = rtol;
      RecoveryResult r;
      if (rprog == "bp") r = solve_bp(a, y, reps, cfg);
      else if (rprog == "ds") r = solve_ds(a, y, rlambda, cfg);
      else r = solve_lasso(a, y, rlambda, cfg);
      if (!rout.empty()) io::write_vector(rout, r.x_hat);
      const double resid = (y - a * r.x_hat).norm();
      if (g.json_out) {
        out << json{{"program", rprog},
                    {"converged", r.converged},
                    {"iterations", r.iterations},
                    {"l1_norm", r.x_hat.lpNorm<1>()},
                    {"residual_l2", resid},
                    {"x_hat", vec_json(r.x_hat)}}
                   .dump(2)
            << '\n';
      } else {
        print_fields(out, {{"program", rprog},
                           {"converged", r.converged ? "true" : "false"},
                           {"iterations", std::to_string(r.iterations)},
                           {"l1_norm", human(r.x_hat.lpNorm<1>())},
                           {"residual_l2", human(resid)}});
        if (rout.empty()) io::write_vector(out, r.x_hat);
      }
      if (!r.converged) err << "warning: solver did not converge; returning the best iterate\n";
    };
  });

  // ric
  auto* ri = app.add_subcommand("ric", "Monte Carlo restricted isometry constant delta_2k");
  std::string rimat, riq;
  std::int64_t rik = 1, risamples = 1000;
  double rieps = 1.0;
  ri->add_option("-a,--matrix", rimat, "Matrix CSV")->required();
  ri->add_option("-k,--k", rik, "Sparsity k (order 2k)")->required()->check(CLI::PositiveNumber);
  ri->add_option("--samples", risamples, "Sampled submatrices")->capture_default_str()->check(CLI::PositiveNumber);
  ri->add_option("--bound-q", riq, "Also evaluate the RIC error bound for this q in [1, 2]")->check(kQValidator);
  ri->add_option("--eps", rieps, "Noise level for the bound")->capture_default_str()->check(CLI::NonNegativeNumber);
  ri->callback([&] {
    action = [&] {
      const MeasurementMatrix a(io::read_matrix(rimat));
      const auto est = estimate_ric(a, rik, risamples, g.seed, g.threads);
      if (!est.unit_columns) err << "warning: columns are not unit norm\n";
      std::optional<double> b;
      if (!riq.empty()) b = ric_bound(est.delta, rik, parse_q(riq).value(), rieps);
      if (g.json_out) {
        json j = {{"delta", est.delta},
                  {"k", est.k},
                  {"n_samples", est.n_samples},
                  {"direction", std::string(to_string(est.direction))},
                  {"degenerate", est.degenerate},
                  {"unit_columns", est.unit_columns}};
        if (!riq.empty()) j["ric_bound"] = b ? json(*b) : json("NOT_APPLICABLE");
        out << j.dump(2) << '\n';
      } else {
        std::vector<std::pair<std::string, std::string>> rows = {
            {"delta", human(est.delta)},
            {"direction", std::string(to_string(est.direction))},
            {"degenerate", est.degenerate ? "true" : "false"}};
        if (!riq.empty()) rows.emplace_back("ric_bound", b ? human(*b) : "not applicable");
        print_fields(out, rows);
      }
    };
  });

  // bounds
  auto* bo = app.add_subcommand("bounds", "CMSV-based error bounds (and optionally the RIC bound)");
  std::string bmat, bq = "2", bprog = "bp";
  std::int64_t bk = 1;
  double blevel = 1.0, bkappa = 0.5;
  std::optional<double> bsigma;
  int brestarts = 30;
  bool bric = false, bnorm = false;
  std::int64_t bsamples = 1000;
  bo->add_option("-a,--matrix", bmat, "Matrix CSV")->required();
  bo->add_option("-k,--k", bk, "Sparsity level")->required()->check(CLI::PositiveNumber);
  bo->add_option("--q", bq, "Order q > 1 or inf")->capture_default_str()->check(kQValidator);
  bo->add_option("--program", bprog, "bp | ds | lasso")->capture_default_str()->check(CLI::IsMember({"bp", "ds", "lasso"}));
  bo->add_option("--level", blevel, "eps for bp, lambda*sigma for ds and lasso")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  bo->add_option("--kappa", bkappa, "Lasso noise ratio in (0, 1)")->capture_default_str();
  bo->add_option("--sigma-k", bsigma, "Best k-term l1 error; switches to the compressible regime")
      ->check(CLI::NonNegativeNumber);
  bo->add_option("--restarts", brestarts, "CMSV multi-start trials")->capture_default_str()->check(CLI::PositiveNumber);
  bo->add_flag("--normalize", bnorm, "Normalize columns first");
  bo->add_flag("--ric", bric, "Also report the RIC-based bound (bp, q in [1, 2])");
  bo->add_option("--ric-samples", bsamples, "RIC Monte Carlo samples")->capture_default_str()->check(CLI::PositiveNumber);
  bo->callback([&] {
    action = [&] {
      const MeasurementMatrix a = load_matrix(bmat, bnorm);
      const QParam q = parse_q(bq);
      const NoiseModel noise = bprog == "bp"   ? NoiseModel::l2_ball(blevel)
                               : bprog == "ds" ? NoiseModel::correlated_inf(blevel)
                                               : NoiseModel::lasso_pen(blevel, bkappa);
      const BoundRegime regime = bsigma ? BoundRegime::Compressible : BoundRegime::ExactSparse;
      CmsvRequest req;
      req.a = a;
      req.q = q;
      req.s = cmsv_s_for(regime, noise, bk, q, a.cols());
      req.restarts = brestarts;
      req.seed = g.seed;
      req.threads = g.threads;
      const auto rho = estimate_cmsv(req);
      const BoundReport rep = bsigma ? bound_theorem2(rho, bk, q, noise, *bsigma)
                                     : bound_theorem1(rho, bk, q, noise);
      std::optional<double> rb;
      std::optional<RicEstimate> ric;
      if (bric) {
        require(bprog == "bp" && q.is_finite() && q.value() <= 2.0, ErrorCode::InvalidArgument,
                "--ric needs --program bp and q in (1, 2]");
        ric = estimate_ric(a, bk, bsamples, g.seed, g.threads);
        rb = ric_bound(ric->delta, bk, q.value(), blevel);
      }
      if (g.json_out) {
        json j = {{"program", bprog},
                  {"regime", std::string(to_string(rep.regime))},
                  {"q", q_json(q)},
                  {"k", bk},
                  {"s", rho.s},
                  {"s_required", required_cmsv_s(regime, noise, bk, q)},
                  {"rho", rho.value},
                  {"bound_lq", rep.bound_lq},
                  {"bound_l1", rep.bound_l1},
                  {"bound_lq_max_form", rep.bound_lq_max},
                  {"bound_l1_max_form", rep.bound_l1_max},
                  {"caveat_flags", rep.caveat_flags}};
        if (ric) {
          j["delta"] = ric->delta;
          j["ric_bound"] = rb ? json(*rb) : json("NOT_APPLICABLE");
        }
        out << j.dump(2) << '\n';
      } else {
        std::vector<std::pair<std::string, std::string>> rows = {
            {"regime", std::string(to_string(rep.regime))},
            {"s", human(rho.s)},
            {"rho", human(rho.value)},
            {"bound_lq", human(rep.bound_lq)},
            {"bound_l1", human(rep.bound_l1)}};
        if (bsigma) {
          rows.emplace_back("bound_lq_max_form", human(rep.bound_lq_max));
          rows.emplace_back("bound_l1_max_form", human(rep.bound_l1_max));
        }
        std::string flags;
        for (const auto& f : rep.caveat_flags) flags += (flags.empty() ? "" : ",") + f;
        rows.emplace_back("caveats", flags);
        if (ric) {
          rows.emplace_back("delta", human(ric->delta));
          rows.emplace_back("ric_bound", rb ? human(*rb) : "not applicable");
        }
        print_fields(out, rows);
      }
    };
  });

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run a desk-scale experiment and write CSV + JSON");
  std::string ename, edir;
  std::optional<int> etrials, erestarts, esamples;
  std::optional<Eigen::Index> en;
  std::vector<Eigen::Index> em;
  std::vector<double> es;
  std::vector<std::string> eq;
  std::vector<std::int64_t> ek;
  bool efull = false, etiming = false;
  std::vector<std::string> names;
  for (const auto& [k, v] : experiment_names()) names.push_back(v);
  ex->add_option("name", ename, "Experiment name")->required()->check(CLI::IsMember(names));
  ex->add_option("--output-dir", edir, "Output directory (default $QCMSV_OUTPUT_DIR or .)");
  ex->add_option("--trials", etrials, "Matrices / draws / seeds")->check(CLI::PositiveNumber);
  ex->add_option("--restarts", erestarts, "CMSV multi-start trials")->check(CLI::PositiveNumber);
  ex->add_option("--ric-samples", esamples, "RIC samples (fig5)")->check(CLI::PositiveNumber);
  ex->add_option("--n", en, "Columns N")->check(CLI::PositiveNumber);
  ex->add_option("--m", em, "Row counts, increasing")->delimiter(',');
  ex->add_option("--s", es, "Sparsity levels")->delimiter(',');
  ex->add_option("--q", eq, "Orders")->delimiter(',')->check(kQValidator);
  ex->add_option("--k", ek, "Sparsity levels k (fig5)")->delimiter(',');
  ex->add_flag("--full-grid", efull, "table2: every m of the original grid");
  ex->add_flag("--timing", etiming, "Also write <name>.timing.json with wall-clock time");
  ex->callback([&] {
    action = [&] {
      ExperimentConfig cfg;
      cfg.name = parse_experiment_name(ename);
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      cfg.record_timing = etiming;
      if (!edir.empty()) {
        cfg.output_dir = edir;
      } else if (const char* env = std::getenv("QCMSV_OUTPUT_DIR"); env && *env) {
        cfg.output_dir = env;
      }
      cfg.trials = etrials;
      cfg.restarts = erestarts;
      cfg.ric_samples = esamples;
      cfg.n = en;
      if (!em.empty()) cfg.m_list = em;
      if (!es.empty()) cfg.s_list = es;
      if (!eq.empty()) {
        std::vector<QParam> qs;
        for (const auto& s : eq) qs.push_back(parse_q(s));
        cfg.q_list = qs;
      }
      if (!ek.empty()) cfg.k_list = ek;
      cfg.full_grid = efull;
      const auto man = run_experiment(cfg);
      if (g.json_out) {
        out << json{{"experiment", ename}, {"files", man.files}, {"caveats", man.document["caveats"]}}.dump(2)
            << '\n';
      } else {
        for (const auto& f : man.files) out << f << '\n';
      }
      err << ename << " finished in " << human(man.seconds) << " s\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (e.get_exit_code() == 0) return 0;
    (void)code;
    return 2;
  }
  try {
    action();
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qcmsv::cli
