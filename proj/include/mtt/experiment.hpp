#pragma once

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "mtt/estimators.hpp"
#include "mtt/risk.hpp"
#include "mtt/task_model.hpp"

namespace mtt {

struct CellResult {
  int m = 0;
  int n = 0;
  double alpha = 0.0;
  int reps = 0;
  double p_maml_better_pre = 0.0;
  double p_maml_better_post = 0.0;
  double stderr_pre = 0.0;
  double stderr_post = 0.0;
  int degenerate_count = 0;  // rank-deficient reps, excluded from the fractions
  int ties_pre = 0;          // exact loss ties; ties count as DRS-not-worse
  int ties_post = 0;

  int effective_reps() const { return reps - degenerate_count; }
};

struct GridConfig {
  std::vector<int> m_values{2, 9, 45, 211, 1000};
  std::vector<int> n_values{2, 9, 45, 211, 1000};
  std::vector<double> alpha_values{0.25, 0.5, 0.75};
  int reps = 200;
  int eval_tasks = 10000;  // Monte Carlo functional sample for simulation distributions
  std::uint64_t seed = 0;

  void validate() const {
    if (m_values.empty() || n_values.empty() || alpha_values.empty())
      throw ConfigError("GridConfig: empty value list");
    auto check_sorted = [](const std::vector<int>& v, const char* what) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 1) throw ConfigError(std::string("GridConfig: ") + what + " must be >= 1");
        if (i > 0 && v[i] <= v[i - 1])
          throw ConfigError(std::string("GridConfig: ") + what + " must be strictly increasing");
      }
    };
    check_sorted(m_values, "m_values");
    check_sorted(n_values, "n_values");
    for (double a : alpha_values)
      if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("GridConfig: alpha values must lie in [0,1]");
    if (reps < 1) throw ConfigError("GridConfig: reps must be >= 1");
    if (eval_tasks < 1) throw ConfigError("GridConfig: eval_tasks must be >= 1");
  }
};

// Cell layout: index (ai * |m_values| + mi) * |n_values| + ni.
struct ExperimentGrid {
  std::vector<int> m_values;
  std::vector<int> n_values;
  std::vector<double> alpha_values;
  int reps = 0;
  std::vector<CellResult> cells;

  const CellResult& cell(std::size_t ai, std::size_t mi, std::size_t ni) const {
    return cells[(ai * m_values.size() + mi) * n_values.size() + ni];
  }
};

namespace detail {

inline constexpr std::uint64_t kEvalStream = 0;
inline constexpr std::uint64_t kCellStream = 1;

inline double binomial_stderr(double p, int count) {
  return count > 0 ? std::sqrt(p * (1.0 - p) / count) : 0.0;
}

// All alpha panels of one (m, n) cell share the per-rep datasets (and hence
// the DRS estimate); only the MAML solve and its evaluation vary with alpha.
inline std::vector<CellResult> run_cell_panels(
    const TaskDistribution& gen_dist, int m, int n, const std::vector<double>& alphas,
    int reps, std::uint64_t cell_seed, const QuadraticLoss& pre_loss,
    const std::vector<QuadraticLoss>& post_losses) {
  std::vector<CellResult> out(alphas.size());
  for (std::size_t ai = 0; ai < alphas.size(); ++ai)
    out[ai] = CellResult{m, n, alphas[ai], reps, 0, 0, 0, 0, 0, 0, 0};
  std::vector<int> wins_pre(alphas.size(), 0), wins_post(alphas.size(), 0);
  for (int r = 0; r < reps; ++r) {
    const MetaDataset data = generate_dataset(
        gen_dist, m, n, derive_seed(cell_seed, {static_cast<std::uint64_t>(r)}), false);
    const EstimateResult drs = solve_drs(data);
    const double drs_pre = pre_loss.value(drs.theta_hat);
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const EstimateResult maml = solve_maml(data, alphas[ai]);
      if (drs.rank_deficient || maml.rank_deficient) {
        ++out[ai].degenerate_count;
        continue;
      }
      const double maml_pre = pre_loss.value(maml.theta_hat);
      if (maml_pre < drs_pre)
        ++wins_pre[ai];
      else if (maml_pre == drs_pre)
        ++out[ai].ties_pre;
      const double drs_post = post_losses[ai].value(drs.theta_hat);
      const double maml_post = post_losses[ai].value(maml.theta_hat);
      if (maml_post < drs_post)
        ++wins_post[ai];
      else if (maml_post == drs_post)
        ++out[ai].ties_post;
    }
  }
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const int eff = out[ai].effective_reps();
    if (eff > 0) {
      out[ai].p_maml_better_pre = static_cast<double>(wins_pre[ai]) / eff;
      out[ai].p_maml_better_post = static_cast<double>(wins_post[ai]) / eff;
    }
    out[ai].stderr_pre = binomial_stderr(out[ai].p_maml_better_pre, eff);
    out[ai].stderr_post = binomial_stderr(out[ai].p_maml_better_post, eff);
  }
  return out;
}

}  // namespace detail

// Full (alpha, M, N) sweep. Deterministic given config.seed: the evaluation
// functionals use one shared task sample per grid; each (m, n) cell derives
// its dataset stream from (m index, n index) only, so alpha panels compare
// the estimators on identical datasets.
inline ExperimentGrid run_grid(const TaskDistribution& dist, const GridConfig& config) {
  dist.validate();
  config.validate();
  const FiniteDistribution eval_dist =
      dist.is_finite() ? dist.finite()
                       : monte_carlo_finite(dist, config.eval_tasks,
                                            derive_seed(config.seed, {detail::kEvalStream}));
  const QuadraticLoss pre_loss = pre_adaptation_quadratic(eval_dist);
  ExperimentGrid grid;
  grid.m_values = config.m_values;
  grid.n_values = config.n_values;
  grid.alpha_values = config.alpha_values;
  grid.reps = config.reps;
  grid.cells.resize(config.alpha_values.size() * config.m_values.size() *
                    config.n_values.size());
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const int n = config.n_values[ni];
    std::vector<QuadraticLoss> post_losses;
    post_losses.reserve(config.alpha_values.size());
    for (double a : config.alpha_values)
      post_losses.push_back(post_adapt_quadratic(eval_dist, a, n));
    for (std::size_t mi = 0; mi < config.m_values.size(); ++mi) {
      const std::uint64_t cell_seed = derive_seed(
          config.seed, {detail::kCellStream, static_cast<std::uint64_t>(mi),
                        static_cast<std::uint64_t>(ni)});
      const std::vector<CellResult> panels = detail::run_cell_panels(
          dist, config.m_values[mi], n, config.alpha_values, config.reps, cell_seed,
          pre_loss, post_losses);
      for (std::size_t ai = 0; ai < panels.size(); ++ai)
        grid.cells[(ai * config.m_values.size() + mi) * config.n_values.size() + ni] =
            panels[ai];
    }
  }
  return grid;
}

inline CellResult run_cell(const TaskDistribution& dist, int m, int n, double alpha,
                           int reps, std::uint64_t rng_seed) {
  GridConfig config;
  config.m_values = {m};
  config.n_values = {n};
  config.alpha_values = {alpha};
  config.reps = reps;
  config.seed = rng_seed;
  return run_grid(dist, config).cells.front();
}

struct WelchResult {
  double t_value = 0.0;
  double dof = 0.0;
  double p_greater = 0.0;  // P(group a mean > group b mean) under H0, one-sided
};

inline WelchResult welch_test(double mean_a, double var_a, long long n_a, double mean_b,
                              double var_b, long long n_b) {
  if (n_a < 2 || n_b < 2) throw AssumptionError("welch_test: sample sizes must be >= 2");
  if (var_a < 0.0 || var_b < 0.0) throw AssumptionError("welch_test: negative variance");
  const double sa = var_a / static_cast<double>(n_a);
  const double sb = var_b / static_cast<double>(n_b);
  if (sa + sb == 0.0)
    throw AssumptionError("welch_test: both variances zero, statistic undefined");
  WelchResult r;
  r.t_value = (mean_a - mean_b) / std::sqrt(sa + sb);
  r.dof = (sa + sb) * (sa + sb) /
          (sa * sa / static_cast<double>(n_a - 1) + sb * sb / static_cast<double>(n_b - 1));
  const boost::math::students_t_distribution<double> dist(r.dof);
  r.p_greater = boost::math::cdf(boost::math::complement(dist, r.t_value));
  return r;
}

// Combines per-seed means and variances by the law of total variance:
// mean = average of means, var = average of within-seed variances plus the
// population variance of the means.
inline std::pair<double, double> compile_seed_stats(const std::vector<double>& per_seed_means,
                                                    const std::vector<double>& per_seed_vars) {
  if (per_seed_means.empty() || per_seed_means.size() != per_seed_vars.size())
    throw ConfigError("compile_seed_stats: lists must be nonempty and equal length");
  const double k = static_cast<double>(per_seed_means.size());
  double mean = 0.0, var_within = 0.0;
  for (std::size_t i = 0; i < per_seed_means.size(); ++i) {
    mean += per_seed_means[i];
    var_within += per_seed_vars[i];
  }
  mean /= k;
  var_within /= k;
  double var_between = 0.0;
  for (double m : per_seed_means) var_between += (m - mean) * (m - mean);
  var_between /= k;
  return {mean, var_within + var_between};
}

}  // namespace mtt
