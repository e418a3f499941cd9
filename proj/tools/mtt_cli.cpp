// Command-line front end: contour sweeps, estimator runs, bound reports, SGD
// bound verification, Welch's test, and dataset generation. JSON config files
// with flag overrides; all file outputs are written via temp file + rename.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mtt/bound_inputs.hpp"
#include "mtt/bounds.hpp"
#include "mtt/errors.hpp"
#include "mtt/estimators.hpp"
#include "mtt/experiment.hpp"
#include "mtt/risk.hpp"
#include "mtt/serialize.hpp"
#include "mtt/sgd_sim.hpp"
#include "mtt/task_model.hpp"

namespace {

using mtt::Json;

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mtt::ConfigError("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw mtt::ConfigError("malformed config file " + path + ": " + e.what());
  }
}

void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
  if (j.is_null()) return;
  if (!j.is_object()) throw mtt::ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw mtt::ConfigError("unknown config key \"" + it.key() + "\" in " + where);
  }
}

// Empty path (or "-") means stdout; file outputs become visible only on
// success via rename.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw mtt::ConfigError("cannot open output file: " + tmp);
    out << content;
    if (!out) {
      std::filesystem::remove(tmp);
      throw mtt::ConfigError("failed writing output file: " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::string& path, const Json& j) {
  write_output(path, j.dump(2) + "\n");
}

const std::vector<std::string> kTaskKeys = {"theta", "noise_var", "q", "weight"};
const std::vector<std::string> kDistKeys = {"type", "tasks", "p", "theta_range",
                                            "noise_var_range"};

mtt::TaskDistribution distribution_from_config(const Json& cfg) {
  if (!cfg.contains("distribution")) {
    mtt::PaperSimulation sim;
    return mtt::TaskDistribution(sim);
  }
  const Json& d = cfg["distribution"];
  reject_unknown_keys(d, kDistKeys, "distribution");
  if (d.contains("tasks"))
    for (const Json& t : d["tasks"]) reject_unknown_keys(t, kTaskKeys, "distribution.tasks");
  return mtt::distribution_from_json(d);
}

// ---- contour ---------------------------------------------------------------

struct ContourArgs {
  std::string config_path, out_path, format = "csv";
  std::vector<int> m_values, n_values;
  std::vector<double> alpha_values;
  int reps = -1, eval_tasks = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void run_contour(const ContourArgs& a) {
  Json file = a.config_path.empty() ? Json::object() : load_config_file(a.config_path);
  reject_unknown_keys(file,
                      {"distribution", "m_values", "n_values", "alpha_values", "reps",
                       "eval_tasks", "seed"},
                      "contour config");
  mtt::GridConfig cfg;
  if (file.contains("m_values")) cfg.m_values = file["m_values"].get<std::vector<int>>();
  if (file.contains("n_values")) cfg.n_values = file["n_values"].get<std::vector<int>>();
  if (file.contains("alpha_values"))
    cfg.alpha_values = file["alpha_values"].get<std::vector<double>>();
  if (file.contains("reps")) cfg.reps = file["reps"].get<int>();
  if (file.contains("eval_tasks")) cfg.eval_tasks = file["eval_tasks"].get<int>();
  if (file.contains("seed")) cfg.seed = file["seed"].get<std::uint64_t>();
  if (!a.m_values.empty()) cfg.m_values = a.m_values;
  if (!a.n_values.empty()) cfg.n_values = a.n_values;
  if (!a.alpha_values.empty()) cfg.alpha_values = a.alpha_values;
  if (a.reps >= 0) cfg.reps = a.reps;
  if (a.eval_tasks >= 0) cfg.eval_tasks = a.eval_tasks;
  if (a.seed_set) cfg.seed = a.seed;
  const mtt::TaskDistribution dist = distribution_from_config(file);

  Json resolved;
  resolved["command"] = "contour";
  resolved["seed"] = cfg.seed;
  resolved["distribution"] = mtt::distribution_to_json(dist);
  resolved["m_values"] = cfg.m_values;
  resolved["n_values"] = cfg.n_values;
  resolved["alpha_values"] = cfg.alpha_values;
  resolved["reps"] = cfg.reps;
  resolved["eval_tasks"] = cfg.eval_tasks;

  const mtt::ExperimentGrid grid = mtt::run_grid(dist, cfg);
  if (a.format == "csv")
    write_output(a.out_path, mtt::grid_to_csv(grid, resolved));
  else if (a.format == "json")
    write_json(a.out_path, mtt::grid_to_json(grid, resolved));
  else
    throw mtt::ConfigError("format must be csv or json, got \"" + a.format + "\"");
}

// ---- gen-data / estimate ---------------------------------------------------

struct GenDataArgs {
  std::string config_path, out_path;
  int m = -1, n = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool drop_task_params = false;
};

void run_gen_data(const GenDataArgs& a) {
  Json file = a.config_path.empty() ? Json::object() : load_config_file(a.config_path);
  reject_unknown_keys(file, {"distribution", "m", "n", "seed", "keep_task_params"},
                      "gen-data config");
  int m = file.value("m", 4), n = file.value("n", 8);
  std::uint64_t seed = file.value("seed", std::uint64_t{0});
  bool keep = file.value("keep_task_params", true);
  if (a.m >= 0) m = a.m;
  if (a.n >= 0) n = a.n;
  if (a.seed_set) seed = a.seed;
  if (a.drop_task_params) keep = false;
  const mtt::TaskDistribution dist = distribution_from_config(file);
  const mtt::MetaDataset data = mtt::generate_dataset(dist, m, n, seed, keep);
  Json out = mtt::dataset_to_json(data);
  Json resolved;
  resolved["command"] = "gen-data";
  resolved["seed"] = seed;
  resolved["distribution"] = mtt::distribution_to_json(dist);
  resolved["m"] = m;
  resolved["n"] = n;
  resolved["keep_task_params"] = keep;
  out["config"] = std::move(resolved);
  write_json(a.out_path, out);
}

struct EstimateArgs {
  std::string config_path, data_path, out_path;
  double alpha = -1.0;
};

void run_estimate(const EstimateArgs& a) {
  Json file = a.config_path.empty() ? Json::object() : load_config_file(a.config_path);
  reject_unknown_keys(file, {"data", "alpha"}, "estimate config");
  std::string data_path = file.value("data", std::string());
  double alpha = file.value("alpha", 0.5);
  if (!a.data_path.empty()) data_path = a.data_path;
  if (a.alpha >= 0.0) alpha = a.alpha;
  if (data_path.empty()) throw mtt::ConfigError("estimate: no dataset path given (--data)");
  std::ifstream in(data_path);
  if (!in) throw mtt::ConfigError("cannot open dataset file: " + data_path);
  Json jdata;
  try {
    jdata = Json::parse(in);
  } catch (const std::exception& e) {
    throw mtt::ConfigError("malformed dataset file " + data_path + ": " + e.what());
  }
  const mtt::MetaDataset data = mtt::dataset_from_json(jdata);
  const mtt::EstimateResult drs = mtt::solve_drs(data);
  const mtt::EstimateResult maml = mtt::solve_maml(data, alpha);
  Json out;
  out["config"] = {{"command", "estimate"}, {"data", data_path}, {"alpha", alpha}};
  out["theta_drs"] = mtt::vector_to_json(drs.theta_hat);
  out["theta_maml"] = mtt::vector_to_json(maml.theta_hat);
  out["drs"] = {{"rank_deficient", drs.rank_deficient},
                {"min_singular_value", drs.min_singular_value}};
  out["maml"] = {{"rank_deficient", maml.rank_deficient},
                 {"min_singular_value", maml.min_singular_value}};
  write_json(a.out_path, out);
}

// ---- bounds ----------------------------------------------------------------

mtt::SmoothnessConstants constants_from_json(const Json& j) {
  reject_unknown_keys(j,
                      {"delta", "lipschitz_l", "smooth_mu", "hessian_lip", "grad_var_data",
                       "grad_var_task", "hess_var"},
                      "constants");
  mtt::SmoothnessConstants c;
  c.delta = j.value("delta", c.delta);
  c.lipschitz_l = j.value("lipschitz_l", c.lipschitz_l);
  c.smooth_mu = j.value("smooth_mu", c.smooth_mu);
  c.hessian_lip = j.value("hessian_lip", c.hessian_lip);
  c.grad_var_data = j.value("grad_var_data", c.grad_var_data);
  c.grad_var_task = j.value("grad_var_task", c.grad_var_task);
  c.hess_var = j.value("hess_var", c.hess_var);
  c.validate();
  return c;
}

Json constants_to_json(const mtt::SmoothnessConstants& c) {
  Json j;
  j["delta"] = c.delta;
  j["lipschitz_l"] = c.lipschitz_l;
  j["smooth_mu"] = c.smooth_mu;
  j["hessian_lip"] = c.hessian_lip;
  j["grad_var_data"] = c.grad_var_data;
  j["grad_var_task"] = c.grad_var_task;
  j["hess_var"] = c.hess_var;
  return j;
}

mtt::SgdSchedule schedule_from_json(const Json& j) {
  reject_unknown_keys(
      j, {"t_train", "t_test", "m", "n", "d_hessian", "lr_train", "lr_test", "alpha"},
      "schedule");
  mtt::SgdSchedule s;
  s.t_train = j.value("t_train", s.t_train);
  s.t_test = j.value("t_test", s.t_test);
  s.m = j.value("m", s.m);
  s.n = j.value("n", s.n);
  s.d_hessian = j.value("d_hessian", s.d_hessian);
  s.lr_train = j.value("lr_train", s.lr_train);
  s.lr_test = j.value("lr_test", s.lr_test);
  s.alpha = j.value("alpha", s.alpha);
  s.validate();
  return s;
}

Json schedule_to_json(const mtt::SgdSchedule& s) {
  Json j;
  j["t_train"] = s.t_train;
  j["t_test"] = s.t_test;
  j["m"] = s.m;
  j["n"] = s.n;
  j["d_hessian"] = s.d_hessian;
  j["lr_train"] = s.lr_train;
  j["lr_test"] = s.lr_test;
  j["alpha"] = s.alpha;
  return j;
}

const std::vector<std::string> kStatKeys = {
    "m",          "n",
    "alpha",      "delta",
    "q_norm_bound", "tau",
    "tau_prime",  "eta",
    "xi",         "phi",
    "subgauss_k", "univ_c",
    "p",          "omega",
    "var_q_norm", "var_qtheta_trace",
    "var_s_norm", "var_stheta_trace",
    "noise_weighted_trace", "lambda_min_eq",
    "lambda_min_es", "theta_star_drs_norm",
    "theta_star_maml_norm"};

void apply_stat_overrides(mtt::LinRegBoundInputs& in, const Json& j) {
  in.q_norm_bound = j.value("q_norm_bound", in.q_norm_bound);
  in.tau = j.value("tau", in.tau);
  in.tau_prime = j.value("tau_prime", in.tau_prime);
  in.eta = j.value("eta", in.eta);
  in.xi = j.value("xi", in.xi);
  in.phi = j.value("phi", in.phi);
  in.subgauss_k = j.value("subgauss_k", in.subgauss_k);
  in.univ_c = j.value("univ_c", in.univ_c);
  in.p = j.value("p", in.p);
  in.var_q_norm = j.value("var_q_norm", in.var_q_norm);
  in.var_qtheta_trace = j.value("var_qtheta_trace", in.var_qtheta_trace);
  in.var_s_norm = j.value("var_s_norm", in.var_s_norm);
  in.var_stheta_trace = j.value("var_stheta_trace", in.var_stheta_trace);
  in.noise_weighted_trace = j.value("noise_weighted_trace", in.noise_weighted_trace);
  in.lambda_min_eq = j.value("lambda_min_eq", in.lambda_min_eq);
  in.lambda_min_es = j.value("lambda_min_es", in.lambda_min_es);
  in.theta_star_drs_norm = j.value("theta_star_drs_norm", in.theta_star_drs_norm);
  in.theta_star_maml_norm = j.value("theta_star_maml_norm", in.theta_star_maml_norm);
}

Json stat_inputs_to_json(const mtt::LinRegBoundInputs& in) {
  Json j;
  j["q_norm_bound"] = in.q_norm_bound;
  j["tau"] = in.tau;
  j["tau_prime"] = in.tau_prime;
  j["eta"] = in.eta;
  j["xi"] = in.xi;
  j["phi"] = in.phi;
  j["subgauss_k"] = in.subgauss_k;
  j["univ_c"] = in.univ_c;
  j["p"] = in.p;
  j["omega"] = in.omega;
  j["var_q_norm"] = in.var_q_norm;
  j["var_qtheta_trace"] = in.var_qtheta_trace;
  j["var_s_norm"] = in.var_s_norm;
  j["var_stheta_trace"] = in.var_stheta_trace;
  j["noise_weighted_trace"] = in.noise_weighted_trace;
  j["lambda_min_eq"] = in.lambda_min_eq;
  j["lambda_min_es"] = in.lambda_min_es;
  j["theta_star_drs_norm"] = in.theta_star_drs_norm;
  j["theta_star_maml_norm"] = in.theta_star_maml_norm;
  return j;
}

struct BoundsArgs {
  std::string config_path, out_path;
};

// Evaluates every bound the config supplies inputs for: the sample-complexity
// section needs "constants" + "schedule" (+ lambda values), the
// statistical-error section needs "statistical" and/or a finite
// "distribution" to compute population functionals from.
void run_bounds(const BoundsArgs& a) {
  if (a.config_path.empty()) throw mtt::ConfigError("bounds: --config file required");
  Json file = load_config_file(a.config_path);
  reject_unknown_keys(file,
                      {"constants", "schedule", "lambda_drs", "lambda_maml", "statistical",
                       "distribution", "rho"},
                      "bounds config");
  Json out;
  out["config"] = file;
  out["config"]["command"] = "bounds";
  bool any = false;
  if (file.contains("constants") && file.contains("schedule")) {
    any = true;
    const mtt::SmoothnessConstants c = constants_from_json(file["constants"]);
    const mtt::SgdSchedule sched = schedule_from_json(file["schedule"]);
    const double lambda_drs = file.value("lambda_drs", 0.0);
    const double lambda_maml = file.value("lambda_maml", 0.0);
    const auto [dtr, dte] = mtt::drs_complexity_constants(c, sched.m, sched.n);
    const auto [mtr, mte] =
        mtt::maml_complexity_constants(c, sched.m, sched.n, sched.alpha);
    Json comp;
    comp["drs"] = {{"c_tr", dtr},
                   {"c_te", dte},
                   {"bound", mtt::drs_complexity_bound(c, lambda_drs, sched)}};
    comp["maml"] = {{"c_tr", mtr},
                    {"c_te", mte},
                    {"bound", mtt::maml_complexity_bound(c, lambda_maml, sched)}};
    if (sched.lr_train > 0.0 || sched.lr_test > 0.0 ||
        (sched.t_train == 0 && sched.t_test == 0)) {
      comp["drs"]["two_rate_bound"] = mtt::drs_two_rate_bound(c, lambda_drs, sched);
      comp["maml"]["two_rate_bound"] = mtt::maml_two_rate_bound(c, lambda_maml, sched);
    }
    out["complexity"] = std::move(comp);
  }
  if (file.contains("statistical") || file.contains("distribution")) {
    any = true;
    const Json stat = file.value("statistical", Json::object());
    reject_unknown_keys(stat, kStatKeys, "statistical");
    const long long m = stat.value("m", 16);
    const long long n = stat.value("n", 16);
    const double alpha = stat.value("alpha", 0.5);
    const double delta = stat.value("delta", 0.05);
    mtt::LinRegBoundInputs in;
    if (file.contains("distribution")) {
      const mtt::TaskDistribution dist = distribution_from_config(file);
      in = mtt::bound_inputs_from_distribution(dist.finite(), alpha, m, delta);
    }
    apply_stat_overrides(in, stat);
    mtt::LinRegBoundInputs in_drs = in, in_maml = in;
    if (!stat.contains("omega")) {
      in_drs.omega = mtt::omega_default_drs(in.p, m, delta);
      in_maml.omega = mtt::omega_default_maml(in.p, m, delta);
    } else {
      in_drs.omega = in_maml.omega = stat["omega"].get<double>();
    }
    const double rho = file.value("rho", 0.1);
    Json sj;
    sj["m"] = m;
    sj["n"] = n;
    sj["alpha"] = alpha;
    sj["delta"] = delta;
    sj["inputs"] = stat_inputs_to_json(in_drs);
    sj["omega_drs"] = in_drs.omega;
    sj["omega_maml"] = in_maml.omega;
    sj["drs_bound"] = mtt::drs_statistical_bound(in_drs, m, n);
    sj["maml_bound"] = mtt::maml_statistical_bound(in_maml, m, n, alpha);
    sj["bernstein_rhs"] =
        mtt::bernstein_rhs_symmetric(in.q_norm_bound, in.var_q_norm, m, in.p, rho);
    sj["covariance_rhs"] =
        mtt::covariance_rhs(in.q_norm_bound, in.subgauss_k, in.univ_c, n, in.p, rho);
    out["statistical"] = std::move(sj);
  }
  if (!any)
    throw mtt::ConfigError(
        "bounds config must provide \"constants\"+\"schedule\" and/or "
        "\"statistical\"/\"distribution\" blocks");
  write_json(a.out_path, out);
}

// ---- sgd-verify ------------------------------------------------------------

struct SgdVerifyArgs {
  std::string config_path, out_path, method;
  int seeds = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void run_sgd_verify(const SgdVerifyArgs& a) {
  Json file = a.config_path.empty() ? Json::object() : load_config_file(a.config_path);
  reject_unknown_keys(file,
                      {"method", "distribution", "grad_noise_cov_trace", "hess_noise_scale",
                       "domain_radius", "project", "schedule", "seeds", "theta0", "seed"},
                      "sgd-verify config");
  mtt::VerifyConfig cfg;
  cfg.method = file.value("method", std::string("drs"));
  if (file.contains("distribution")) {
    cfg.oracle.tasks = distribution_from_config(file).finite();
  } else {
    // small default family so the command is runnable out of the box
    mtt::WeightedTask t1, t2;
    t1.params.theta = mtt::Vector::Constant(1, 0.5);
    t1.params.q = mtt::Matrix::Constant(1, 1, 1.0);
    t1.weight = 0.5;
    t2.params.theta = mtt::Vector::Constant(1, 1.5);
    t2.params.q = mtt::Matrix::Constant(1, 1, 1.25);
    t2.weight = 0.5;
    cfg.oracle.tasks.tasks = {t1, t2};
  }
  cfg.oracle.grad_noise_cov_trace = file.value("grad_noise_cov_trace", 0.25);
  cfg.oracle.hess_noise_scale = file.value("hess_noise_scale", 0.1);
  cfg.oracle.domain_radius = file.value("domain_radius", 8.0);
  cfg.oracle.project = file.value("project", true);
  if (file.contains("schedule")) {
    cfg.sched = schedule_from_json(file["schedule"]);
  } else {
    cfg.sched.t_train = 100;
    cfg.sched.t_test = 25;
    cfg.sched.m = 4;
    cfg.sched.n = 4;
    cfg.sched.d_hessian = 2;
    cfg.sched.alpha = cfg.method == "maml" ? 0.1 : 0.0;
  }
  cfg.seeds = file.value("seeds", 50);
  cfg.seed = file.value("seed", std::uint64_t{0});
  if (file.contains("theta0")) cfg.theta0 = mtt::vector_from_json(file["theta0"]);
  if (!a.method.empty()) cfg.method = a.method;
  if (a.seeds >= 0) cfg.seeds = a.seeds;
  if (a.seed_set) cfg.seed = a.seed;

  const mtt::VerifyReport rep = mtt::verify_complexity_bound(cfg);
  Json out;
  Json resolved;
  resolved["command"] = "sgd-verify";
  resolved["seed"] = cfg.seed;
  resolved["method"] = cfg.method;
  resolved["distribution"] = mtt::distribution_to_json(mtt::TaskDistribution(cfg.oracle.tasks));
  resolved["grad_noise_cov_trace"] = cfg.oracle.grad_noise_cov_trace;
  resolved["hess_noise_scale"] = cfg.oracle.hess_noise_scale;
  resolved["domain_radius"] = cfg.oracle.domain_radius;
  resolved["project"] = cfg.oracle.project;
  resolved["schedule"] = schedule_to_json(cfg.sched);
  resolved["seeds"] = cfg.seeds;
  if (cfg.theta0.size() > 0) resolved["theta0"] = mtt::vector_to_json(cfg.theta0);
  out["config"] = std::move(resolved);
  out["constants"] = constants_to_json(rep.constants);
  out["lambda"] = rep.lambda;
  out["lr_train"] = rep.lr_train;
  out["lr_test"] = rep.lr_test;
  out["lhs_mean"] = rep.lhs_mean;
  out["lhs_stderr"] = rep.lhs_stderr;
  out["rhs"] = rep.rhs;
  out["margin"] = rep.margin;
  out["satisfied"] = rep.satisfied;
  out["diverged"] = rep.diverged;
  out["projected"] = rep.projected;
  write_json(a.out_path, out);
}

// ---- welch -----------------------------------------------------------------

struct WelchArgs {
  std::string config_path, out_path;
  double mean_a = 0, var_a = 0, mean_b = 0, var_b = 0;
  long long n_a = 0, n_b = 0;
  bool mean_a_set = false, var_a_set = false, n_a_set = false;
  bool mean_b_set = false, var_b_set = false, n_b_set = false;
};

void run_welch(const WelchArgs& a) {
  Json file = a.config_path.empty() ? Json::object() : load_config_file(a.config_path);
  reject_unknown_keys(file, {"mean_a", "var_a", "n_a", "mean_b", "var_b", "n_b"},
                      "welch config");
  double mean_a = file.value("mean_a", 0.0), var_a = file.value("var_a", 1.0);
  double mean_b = file.value("mean_b", 0.0), var_b = file.value("var_b", 1.0);
  long long n_a = file.value("n_a", 5), n_b = file.value("n_b", 5);
  if (a.mean_a_set) mean_a = a.mean_a;
  if (a.var_a_set) var_a = a.var_a;
  if (a.n_a_set) n_a = a.n_a;
  if (a.mean_b_set) mean_b = a.mean_b;
  if (a.var_b_set) var_b = a.var_b;
  if (a.n_b_set) n_b = a.n_b;
  const mtt::WelchResult r = mtt::welch_test(mean_a, var_a, n_a, mean_b, var_b, n_b);
  Json out;
  out["config"] = {{"command", "welch"}, {"mean_a", mean_a}, {"var_a", var_a},
                   {"n_a", n_a},         {"mean_b", mean_b}, {"var_b", var_b},
                   {"n_b", n_b}};
  out["t"] = r.t_value;
  out["dof"] = r.dof;
  out["p_greater"] = r.p_greater;
  write_json(a.out_path, out);
}

Json error_json(const std::string& code, const std::string& message) {
  Json j;
  j["error"] = {{"code", code}, {"message", message}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meta-linear-regression trade-off toolkit"};
  app.require_subcommand(1);

  ContourArgs contour;
  CLI::App* c = app.add_subcommand("contour", "Monte Carlo win-fraction grid over (M, N, alpha)");
  c->add_option("--config", contour.config_path, "JSON config file");
  c->add_option("--out", contour.out_path, "output path (default stdout)");
  c->add_option("--format", contour.format, "csv or json")->capture_default_str();
  c->add_option("--m-values", contour.m_values, "task counts")->delimiter(',');
  c->add_option("--n-values", contour.n_values, "per-half sample counts")->delimiter(',');
  c->add_option("--alpha-values", contour.alpha_values, "adaptation rates")->delimiter(',');
  c->add_option("--reps", contour.reps, "datasets per cell");
  c->add_option("--eval-tasks", contour.eval_tasks, "Monte Carlo evaluation sample size");
  c->add_option("--seed", contour.seed, "master seed")->each([&](const std::string&) {
    contour.seed_set = true;
  });
  c->callback([&]() { run_contour(contour); });

  GenDataArgs gen;
  CLI::App* g = app.add_subcommand("gen-data", "sample a meta-learning dataset as JSON");
  g->add_option("--config", gen.config_path, "JSON config file");
  g->add_option("--out", gen.out_path, "output path (default stdout)");
  g->add_option("--m", gen.m, "number of tasks");
  g->add_option("--n", gen.n, "samples per half-batch");
  g->add_option("--seed", gen.seed, "seed")->each([&](const std::string&) { gen.seed_set = true; });
  g->add_flag("--drop-task-params", gen.drop_task_params, "omit generating task parameters");
  g->callback([&]() { run_gen_data(gen); });

  EstimateArgs est;
  CLI::App* e = app.add_subcommand("estimate", "closed-form estimates from a dataset file");
  e->add_option("--config", est.config_path, "JSON config file");
  e->add_option("--data", est.data_path, "dataset JSON path");
  e->add_option("--alpha", est.alpha, "adaptation rate for the meta estimator");
  e->add_option("--out", est.out_path, "output path (default stdout)");
  e->callback([&]() { run_estimate(est); });

  BoundsArgs bounds;
  CLI::App* b = app.add_subcommand("bounds", "evaluate the closed-form bound set");
  b->add_option("--config", bounds.config_path, "JSON constants file")->required();
  b->add_option("--out", bounds.out_path, "output path (default stdout)");
  b->callback([&]() { run_bounds(bounds); });

  SgdVerifyArgs verify;
  CLI::App* v = app.add_subcommand("sgd-verify", "empirical check of the SGD complexity bound");
  v->add_option("--config", verify.config_path, "JSON config file");
  v->add_option("--out", verify.out_path, "output path (default stdout)");
  v->add_option("--method", verify.method, "drs or maml");
  v->add_option("--seeds", verify.seeds, "independent runs to average");
  v->add_option("--seed", verify.seed, "master seed")->each([&](const std::string&) {
    verify.seed_set = true;
  });
  v->callback([&]() { run_sgd_verify(verify); });

  WelchArgs welch;
  CLI::App* w = app.add_subcommand("welch", "one-sided Welch's t-test");
  w->add_option("--config", welch.config_path, "JSON config file");
  w->add_option("--out", welch.out_path, "output path (default stdout)");
  auto mark = [](bool& flag) {
    return [&flag](const std::string&) { flag = true; };
  };
  w->add_option("--mean-a", welch.mean_a, "group a mean")->each(mark(welch.mean_a_set));
  w->add_option("--var-a", welch.var_a, "group a variance")->each(mark(welch.var_a_set));
  w->add_option("--n-a", welch.n_a, "group a sample count")->each(mark(welch.n_a_set));
  w->add_option("--mean-b", welch.mean_b, "group b mean")->each(mark(welch.mean_b_set));
  w->add_option("--var-b", welch.var_b, "group b variance")->each(mark(welch.var_b_set));
  w->add_option("--n-b", welch.n_b, "group b sample count")->each(mark(welch.n_b_set));
  w->callback([&]() { run_welch(welch); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex);  // --help and friends
    std::cerr << error_json("usage_error", ex.what()).dump() << "\n";
    return 1;
  } catch (const mtt::ConfigError& ex) {
    std::cerr << error_json("usage_error", ex.what()).dump() << "\n";
    return 1;
  } catch (const mtt::AssumptionError& ex) {
    std::cerr << error_json("assumption_violation", ex.what()).dump() << "\n";
    return 2;
  } catch (const mtt::SingularMatrixError& ex) {
    std::cerr << error_json("numerical_failure", ex.what()).dump() << "\n";
    return 3;
  } catch (const std::invalid_argument& ex) {
    // DimensionError, DistributionError
    std::cerr << error_json("numerical_failure", ex.what()).dump() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << error_json("internal_error", ex.what()).dump() << "\n";
    return 3;
  }
  return 0;
}
