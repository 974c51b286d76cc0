// erlq: command-line front end for the transient Erlang A library.
//
// Subcommands produce machine-readable tables (CSV by default, JSON with
// --format json).  Exit codes: 0 success, 2 validation failure, 3 accuracy
// failure, 64 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include "erlang_a/erlang_a.hpp"
#include "erlang_a/validation.hpp"

using namespace erlang_a;
using nlohmann::json;

namespace {

struct CommonOpts {
  double lambda = 0.0;
  double mu = 1.0;
  std::optional<double> rho;
  int m = 1;
  double eta = 1.0;
  std::string format = "csv";
  double inv_target = 1e-8;
  double quad_tol = 1e-12;
  int max_nodes = 3200;
  std::string method = "euler";
  int threads = 1;
};

void add_model_flags(CLI::App* cmd, CommonOpts& o, bool need_m = true) {
  cmd->add_option("--lambda", o.lambda, "arrival rate");
  cmd->add_option("--mu", o.mu, "per-server service rate (default 1)");
  cmd->add_option("--rho", o.rho, "offered load lambda/mu (alternative to --lambda)");
  if (need_m) cmd->add_option("--m", o.m, "server count")->required(false);
  cmd->add_option("--eta", o.eta, "abandonment rate");
  cmd->add_option("--format", o.format, "output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--inv-target", o.inv_target, "inversion absolute accuracy target");
  cmd->add_option("--quad-tol", o.quad_tol, "contour quadrature relative tolerance");
  cmd->add_option("--max-nodes", o.max_nodes, "contour quadrature node budget");
  cmd->add_option("--method", o.method, "inversion method: euler | gaver")
      ->check(CLI::IsMember({"euler", "gaver"}));
  cmd->add_option("--threads", o.threads, "worker threads for grid fan-out");
}

ModelParams make_params(const CommonOpts& o) {
  if (o.rho.has_value()) return ModelParams(*o.rho * o.mu, o.mu, o.m, o.eta * o.mu);
  if (o.lambda <= 0.0)
    throw CLI::ValidationError("--lambda or --rho is required and must be positive");
  return ModelParams(o.lambda, o.mu, o.m, o.eta);
}

InversionConfig make_inv(const CommonOpts& o) {
  InversionConfig cfg;
  cfg.target_abs = o.inv_target;
  if (o.method == "gaver") cfg.method = InversionConfig::Method::gaver;
  return cfg;
}

ContourConfig make_contour(const CommonOpts& o) {
  ContourConfig cfg;
  cfg.rel_tol = o.quad_tol;
  cfg.max_nodes = o.max_nodes;
  return cfg;
}

int thread_count(const CommonOpts& o) {
  if (o.threads > 1) return o.threads;
  if (const char* env = std::getenv("ERLANG_A_THREADS")) {
    int v = std::atoi(env);
    if (v > 1) return v;
  }
  return 1;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void emit(const std::string& format, const std::string& subcommand,
          const std::vector<std::string>& header, const std::vector<json>& rows,
          const json& params) {
  if (format == "json") {
    json out;
    out["subcommand"] = subcommand;
    out["params"] = params;
    out["rows"] = rows;
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < header.size(); ++i)
    std::cout << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const json& v = row.at(header[i]);
      if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.15g", v.get<double>());
        std::cout << buf;
      } else if (v.is_string()) {
        std::cout << v.get<std::string>();
      } else {
        std::cout << v.dump();
      }
      std::cout << (i + 1 < header.size() ? "," : "\n");
    }
  }
}

json model_json(const ModelParams& p) {
  return json{{"lambda", p.lambda}, {"mu", p.mu}, {"m", p.m}, {"eta", p.eta}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transient Erlang A calculator"};
  app.require_subcommand(1);

  CommonOpts opt;
  int exit_status = 0;

  // ---- steady ----
  auto* steady = app.add_subcommand("steady", "stationary distribution");
  int steady_nmax = -1;
  add_model_flags(steady, opt);
  steady->add_option("--nmax", steady_nmax, "truncation level");
  steady->callback([&] {
    ModelParams p = make_params(opt);
    Pmf pmf = steady_state(p, steady_nmax);
    std::vector<json> rows;
    for (int n = 0; n <= pmf.n_max(); ++n)
      rows.push_back({{"n", n}, {"probability", pmf.values[n]}});
    json params = model_json(p);
    params["tail_mass"] = pmf.tail_mass;
    emit(opt.format, "steady", {"n", "probability"}, rows, params);
  });

  // ---- transient ----
  auto* transient = app.add_subcommand("transient", "time-dependent distribution");
  int tr_n0 = 0, tr_nmax = -1;
  std::vector<double> tr_t;
  std::vector<int> tr_n;
  bool tr_oracle = false;
  add_model_flags(transient, opt);
  transient->add_option("--n0", tr_n0, "initial state");
  transient->add_option("--t", tr_t, "time grid")->required();
  transient->add_option("--n", tr_n, "target states (default: all up to truncation)");
  transient->add_option("--nmax", tr_nmax, "truncation level");
  transient->add_flag("--oracle", tr_oracle, "add a uniformization oracle column");
  transient->callback([&] {
    ModelParams p = make_params(opt);
    InversionConfig inv = make_inv(opt);
    std::function<std::vector<cplx>(cplx)> column;
    int n_max;
    if (p.eta_n() > 0.0) {
      auto solver = std::make_shared<TransientSolver>(p, tr_n0, tr_nmax, make_contour(opt));
      n_max = solver->n_max();
      column = [solver](cplx th) { return solver->column(th); };
    } else {
      auto solver = std::make_shared<MmmSolver>(p, tr_n0, tr_nmax);
      n_max = solver->n_max();
      column = [solver](cplx th) { return solver->column(th); };
    }
    std::vector<int> targets = tr_n;
    if (targets.empty())
      for (int n = 0; n <= n_max; ++n) targets.push_back(n);

    std::vector<std::vector<json>> per_t(tr_t.size());
    std::atomic<bool> accuracy_flag{false};
    parallel_for(static_cast<int>(tr_t.size()), thread_count(opt), [&](int i) {
      double t = tr_t[i];
      Pmf oracle;
      if (tr_oracle && t > 0.0) {
        OracleConfig ocfg;
        ocfg.n_max = n_max;
        oracle = transient_oracle(p, tr_n0, t, ocfg);
      }
      std::vector<Inverted> inverted(n_max + 1);
      if (t > 0.0) {
        try {
          inverted = invert_column(column, n_max + 1, t, inv);
        } catch (const accuracy_error&) {
          InversionConfig relaxed = inv;
          relaxed.throw_on_nonconverged = false;
          inverted = invert_column(column, n_max + 1, t, relaxed);
          accuracy_flag = true;
        }
      }
      for (int n : targets) {
        json row{{"n", n}, {"t", t}};
        if (t == 0.0) {
          row["probability"] = (n == tr_n0) ? 1.0 : 0.0;
          row["error_estimate"] = 0.0;
        } else {
          row["probability"] = inverted[n].value;
          row["error_estimate"] = inverted[n].err_est;
        }
        if (tr_oracle) row["oracle"] = (t == 0.0) ? ((n == tr_n0) ? 1.0 : 0.0)
                                                  : oracle.values[n];
        per_t[i].push_back(std::move(row));
      }
    });
    std::vector<json> rows;
    for (auto& chunk : per_t)
      for (auto& r : chunk) rows.push_back(std::move(r));
    std::vector<std::string> header{"n", "t", "probability", "error_estimate"};
    if (tr_oracle) header.push_back("oracle");
    json params = model_json(p);
    params["n0"] = tr_n0;
    emit(opt.format, "transient", header, rows, params);
    if (accuracy_flag) exit_status = 3;
  });

  // ---- busy ----
  auto* busy = app.add_subcommand("busy", "all-servers-busy probability");
  int busy_n0 = 0;
  std::vector<double> busy_t;
  add_model_flags(busy, opt);
  busy->add_option("--n0", busy_n0, "initial state");
  busy->add_option("--t", busy_t, "time grid")->required();
  busy->callback([&] {
    ModelParams p = make_params(opt);
    if (!(p.eta_n() > 0.0)) throw CLI::ValidationError("busy requires eta > 0");
    InversionConfig inv = make_inv(opt);
    TransformHandle h = busy_transform(p, busy_n0, make_contour(opt));
    std::vector<json> rows(busy_t.size());
    std::atomic<bool> accuracy_flag{false};
    parallel_for(static_cast<int>(busy_t.size()), thread_count(opt), [&](int i) {
      double t = busy_t[i];
      json row{{"t", t}};
      try {
        auto r = invert_point(h, t, inv);
        row["probability"] = r.value;
        row["error_estimate"] = r.err_est;
      } catch (const accuracy_error& e) {
        row["probability"] = e.best_value.real();
        row["error_estimate"] = e.residual_estimate;
        accuracy_flag = true;
      }
      rows[i] = std::move(row);
    });
    json params = model_json(p);
    params["n0"] = busy_n0;
    emit(opt.format, "busy", {"t", "probability", "error_estimate"}, rows, params);
    if (accuracy_flag) exit_status = 3;
  });

  // ---- fpt ----
  auto* fpt = app.add_subcommand("fpt", "first-passage density and CDF");
  int fpt_n = 0, fpt_nstar = 0;
  std::vector<double> fpt_t;
  bool fpt_oracle_col = false;
  add_model_flags(fpt, opt);
  fpt->add_option("--n", fpt_n, "start state");
  fpt->add_option("--nstar", fpt_nstar, "target level (> m)")->required();
  fpt->add_option("--t", fpt_t, "time grid")->required();
  fpt->add_flag("--oracle", fpt_oracle_col, "add absorbing-chain oracle columns");
  fpt->callback([&] {
    ModelParams p = make_params(opt);
    FptSpec spec{fpt_n, fpt_nstar};
    InversionConfig inv = make_inv(opt);
    TransformHandle h = qhat(p, spec);
    TransformHandle cdf;
    cdf.eval = [&](cplx th) { return h(th) / th; };
    FptCurve oracle;
    if (fpt_oracle_col) oracle = fpt_oracle(p, spec.start, spec.n_star, fpt_t);
    std::vector<json> rows(fpt_t.size());
    std::atomic<bool> accuracy_flag{false};
    parallel_for(static_cast<int>(fpt_t.size()), thread_count(opt), [&](int i) {
      double t = fpt_t[i];
      json row{{"t", t}};
      try {
        auto rd = invert_point(h, t, inv);
        auto rc = invert_point(cdf, t, inv);
        row["density"] = rd.value;
        row["cdf"] = rc.value;
        row["error_estimate"] = std::max(rd.err_est, rc.err_est);
      } catch (const accuracy_error& e) {
        row["density"] = e.best_value.real();
        row["cdf"] = nullptr;
        row["error_estimate"] = e.residual_estimate;
        accuracy_flag = true;
      }
      if (fpt_oracle_col) {
        row["oracle_density"] = oracle.density[i];
        row["oracle_cdf"] = oracle.cdf[i];
      }
      rows[i] = std::move(row);
    });
    std::vector<std::string> header{"t", "density", "cdf", "error_estimate"};
    if (fpt_oracle_col) {
      header.push_back("oracle_density");
      header.push_back("oracle_cdf");
    }
    json params = model_json(p);
    params["n"] = spec.start;
    params["nstar"] = spec.n_star;
    emit(opt.format, "fpt", header, rows, params);
    if (accuracy_flag) exit_status = 3;
  });

  // ---- mean-fpt ----
  auto* meanf = app.add_subcommand("mean-fpt", "mean first-passage times");
  int mean_nstar = 0;
  std::vector<int> mean_n;
  bool mean_recur = false;
  add_model_flags(meanf, opt);
  meanf->add_option("--nstar", mean_nstar, "target level (> m)")->required();
  meanf->add_option("--n", mean_n, "start states (default: all)");
  meanf->add_flag("--recurrence", mean_recur, "add the recurrence-solve column");
  meanf->callback([&] {
    ModelParams p = make_params(opt);
    FptSpec spec{0, mean_nstar};
    auto q = p.eta_n() > 0.0 ? mean_fpt(p, spec) : mean_fpt_recurrence(p, spec);
    auto qr = mean_recur ? mean_fpt_recurrence(p, spec) : std::vector<double>{};
    std::vector<int> starts = mean_n;
    if (starts.empty())
      for (int n = 0; n <= mean_nstar; ++n) starts.push_back(n);
    std::vector<json> rows;
    for (int n : starts) {
      if (n < 0 || n > mean_nstar) throw CLI::ValidationError("start state out of range");
      json row{{"n", n}, {"mean_fpt", q[n]}};
      if (mean_recur) row["recurrence_mean"] = qr[n];
      rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"n", "mean_fpt"};
    if (mean_recur) header.push_back("recurrence_mean");
    json params = model_json(p);
    params["nstar"] = mean_nstar;
    emit(opt.format, "mean-fpt", header, rows, params);
  });

  // ---- limit ----
  auto* limit = app.add_subcommand("limit", "limiting models: mminf | mmm | loss");
  std::string limit_model;
  int lim_n0 = 0, lim_nmax = -1;
  std::vector<double> lim_t;
  std::vector<int> lim_n;
  limit->add_option("model", limit_model, "mminf | mmm | loss")
      ->required()
      ->check(CLI::IsMember({"mminf", "mmm", "loss"}));
  add_model_flags(limit, opt);
  limit->add_option("--n0", lim_n0, "initial state");
  limit->add_option("--t", lim_t, "time grid")->required();
  limit->add_option("--n", lim_n, "target states");
  limit->add_option("--nmax", lim_nmax, "truncation level");
  limit->callback([&] {
    InversionConfig inv = make_inv(opt);
    std::vector<json> rows;
    std::atomic<bool> accuracy_flag{false};
    std::vector<std::string> header{"model", "n", "t", "probability", "error_estimate"};
    double rho = opt.rho.value_or(opt.lambda / opt.mu);
    if (rho <= 0.0) throw CLI::ValidationError("--rho or --lambda required");

    if (limit_model == "mminf") {
      header.push_back("closed_form");
      std::vector<int> targets = lim_n;
      if (targets.empty()) {
        int top = static_cast<int>(std::ceil(rho + 10.0 * std::sqrt(rho + 1.0))) +
                  lim_n0 + 5;
        for (int n = 0; n <= top; ++n) targets.push_back(n);
      }
      for (double t : lim_t) {
        for (int n : targets) {
          json row{{"model", "mminf"}, {"n", n}, {"t", t}};
          double closed = p_mm_inf_closed(rho, lim_n0, n, t * opt.mu);
          if (t == 0.0) {
            row["probability"] = closed;
            row["error_estimate"] = 0.0;
          } else {
            TransformHandle h = phat_mm_inf(rho, lim_n0, n, opt.mu);
            try {
              auto r = invert_point(h, t, inv);
              row["probability"] = r.value;
              row["error_estimate"] = r.err_est;
            } catch (const accuracy_error& e) {
              row["probability"] = e.best_value.real();
              row["error_estimate"] = e.residual_estimate;
              accuracy_flag = true;
            }
          }
          row["closed_form"] = closed;
          rows.push_back(std::move(row));
        }
      }
    } else if (limit_model == "mmm") {
      ModelParams p(rho * opt.mu, opt.mu, opt.m, 0.0);
      MmmSolver solver(p, lim_n0, lim_nmax);
      std::vector<int> targets = lim_n;
      if (targets.empty())
        for (int n = 0; n <= solver.n_max(); ++n) targets.push_back(n);
      for (double t : lim_t) {
        auto add_row = [&](int n, double v, double est) {
          rows.push_back({{"model", "mmm"},
                          {"n", n},
                          {"t", t},
                          {"probability", v},
                          {"error_estimate", est}});
        };
        for (int n : targets) {
          if (t == 0.0) {
            add_row(n, n == lim_n0 ? 1.0 : 0.0, 0.0);
            continue;
          }
          TransformHandle h;
          h.eval = [&, n](cplx th) { return solver.column(th)[n]; };
          try {
            auto r = invert_point(h, t, inv);
            add_row(n, r.value, r.err_est);
          } catch (const accuracy_error& e) {
            add_row(n, e.best_value.real(), e.residual_estimate);
            accuracy_flag = true;
          }
        }
      }
    } else {
      ModelParams p(rho * opt.mu, opt.mu, opt.m, opt.mu);  // eta placeholder
      LossSolver solver(p, lim_n0);
      std::vector<int> targets = lim_n;
      if (targets.empty())
        for (int n = 0; n <= opt.m; ++n) targets.push_back(n);
      for (double t : lim_t) {
        for (int n : targets) {
          json row{{"model", "loss"}, {"n", n}, {"t", t}};
          if (t == 0.0) {
            row["probability"] = (n == lim_n0) ? 1.0 : 0.0;
            row["error_estimate"] = 0.0;
          } else {
            TransformHandle h;
            h.eval = [&, n](cplx th) { return solver.column(th)[n]; };
            try {
              auto r = invert_point(h, t, inv);
              row["probability"] = r.value;
              row["error_estimate"] = r.err_est;
            } catch (const accuracy_error& e) {
              row["probability"] = e.best_value.real();
              row["error_estimate"] = e.residual_estimate;
              accuracy_flag = true;
            }
          }
          rows.push_back(std::move(row));
        }
      }
    }
    json params{{"model", limit_model}, {"rho", rho}, {"m", opt.m}, {"n0", lim_n0}};
    emit(opt.format, "limit", header, rows, params);
    if (accuracy_flag) exit_status = 3;
  });

  // ---- diffusion ----
  auto* diff = app.add_subcommand("diffusion", "heavy-traffic first-passage limits");
  std::string diff_model = "erlanga";
  double diff_beta = 0.0, diff_b = 1.0, diff_eta = 1.0;
  double diff_theta_re = 1.0, diff_theta_im = 0.0;
  std::vector<double> diff_x;
  diff->add_option("--model", diff_model, "mmm | erlanga")
      ->check(CLI::IsMember({"mmm", "erlanga"}));
  diff->add_option("--beta", diff_beta, "slack parameter")->required();
  diff->add_option("--b", diff_b, "scaled exit level")->required();
  diff->add_option("--eta", diff_eta, "abandonment rate (erlanga model)");
  diff->add_option("--theta-re", diff_theta_re, "Re theta");
  diff->add_option("--theta-im", diff_theta_im, "Im theta");
  diff->add_option("--x", diff_x, "scaled states")->required();
  diff->add_option("--format", opt.format, "output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  diff->callback([&] {
    HwScaling sc{diff_beta, diff_b};
    cplx theta(diff_theta_re, diff_theta_im);
    std::vector<json> rows;
    for (double x : diff_x) {
      cplx v = (diff_model == "mmm") ? hw_fpt_mmm(sc, x, theta)
                                     : hw_fpt_erlang_a(sc, diff_eta, x, theta);
      rows.push_back({{"x", x}, {"value_re", v.real()}, {"value_im", v.imag()}});
    }
    json params{{"model", diff_model}, {"beta", diff_beta}, {"b", diff_b},
                {"eta", diff_eta},     {"theta_re", diff_theta_re},
                {"theta_im", diff_theta_im}};
    emit(opt.format, "diffusion", {"x", "value_re", "value_im"}, rows, params);
  });

  // ---- validate ----
  auto* validate = app.add_subcommand("validate", "run the identity suite");
  bool val_full = false;
  std::uint64_t val_seed = 20240601;
  validate->add_flag("--full", val_full, "include slower cross-checks");
  validate->add_option("--seed", val_seed, "random draw seed");
  validate->add_option("--format", opt.format, "output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  validate->callback([&] {
    ValidationConfig cfg;
    cfg.full = val_full;
    cfg.seed = val_seed;
    auto results = run_validation(cfg);
    std::vector<json> rows;
    int failures = 0;
    for (const auto& r : results) {
      rows.push_back({{"check", r.name},
                      {"status", r.pass ? "pass" : "FAIL"},
                      {"metric", r.metric},
                      {"tolerance", r.tol}});
      if (!r.pass) ++failures;
    }
    emit(opt.format, "validate", {"check", "status", "metric", "tolerance"}, rows,
         json{{"seed", val_seed}, {"full", val_full}});
    std::cerr << (failures == 0 ? "all checks passed" : "FAILURES: ")
              << (failures == 0 ? "" : std::to_string(failures)) << "\n";
    if (failures > 0) exit_status = 2;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  } catch (const accuracy_error& e) {
    std::cerr << "accuracy failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }
  return exit_status;
}
