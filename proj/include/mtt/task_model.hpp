#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mtt/errors.hpp"
#include "mtt/linalg.hpp"
#include "mtt/rng.hpp"

namespace mtt {

// One regression task: y = theta' x + eps, eps ~ N(0, noise_var),
// x zero-mean with second moment q = E[x x'].
struct TaskParams {
  Vector theta;
  double noise_var = 0.0;
  Matrix q;

  int dim() const { return static_cast<int>(theta.size()); }

  void validate() const {
    if (theta.size() == 0) throw DimensionError("TaskParams: empty theta");
    if (q.rows() != theta.size() || q.cols() != theta.size())
      throw DimensionError("TaskParams: q must be p x p with p = dim(theta)");
    if (!is_symmetric(q, 1e-12))
      throw AssumptionError("TaskParams: q is not symmetric within 1e-12");
    if (lambda_min_sym(q) < -1e-10)
      throw AssumptionError("TaskParams: q is not positive semidefinite");
    if (noise_var < 0.0) throw AssumptionError("TaskParams: negative noise_var");
  }
};

struct WeightedTask {
  TaskParams params;
  double weight = 1.0;
};

// Finitely supported task distribution. Weights must sum to 1 within 1e-12.
struct FiniteDistribution {
  std::vector<WeightedTask> tasks;

  int dim() const { return tasks.empty() ? 0 : tasks.front().params.dim(); }

  void validate() const {
    if (tasks.empty()) throw DistributionError("FiniteDistribution: no tasks");
    double sum = 0.0, comp = 0.0;  // Kahan, so 1e4 equal weights still sum to 1 within 1e-12
    for (const auto& t : tasks) {
      t.params.validate();
      if (t.params.dim() != dim())
        throw DimensionError("FiniteDistribution: inconsistent task dimensions");
      if (t.weight < 0.0) throw DistributionError("FiniteDistribution: negative weight");
      const double y = t.weight - comp;
      const double s = sum + y;
      comp = (s - sum) - y;
      sum = s;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw DistributionError("FiniteDistribution: weights sum to " +
                              std::to_string(sum) + ", expected 1");
  }

  int draw_index(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      acc += tasks[i].weight;
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(tasks.size()) - 1;
  }
};

// Simulation distribution matching the synthetic study: theta uniform on a
// box, noise variance uniform, q = V diag(theta) V' with V a Haar rotation.
struct PaperSimulation {
  int p = 1;
  std::pair<double, double> theta_range{0.0, 2.0};
  std::pair<double, double> noise_var_range{0.0, 2.0};

  void validate() const {
    if (p < 1) throw DimensionError("PaperSimulation: p must be >= 1");
    if (theta_range.first > theta_range.second ||
        noise_var_range.first > noise_var_range.second)
      throw DistributionError("PaperSimulation: empty parameter range");
    if (theta_range.first < 0.0 || noise_var_range.first < 0.0)
      throw DistributionError(
          "PaperSimulation: ranges must be nonnegative (theta doubles as the "
          "spectrum of q, noise_var is a variance)");
  }
};

class TaskDistribution {
 public:
  TaskDistribution(FiniteDistribution f) : v_(std::move(f)) {}   // NOLINT(google-explicit-constructor)
  TaskDistribution(PaperSimulation s) : v_(std::move(s)) {}      // NOLINT(google-explicit-constructor)

  bool is_finite() const { return std::holds_alternative<FiniteDistribution>(v_); }

  const FiniteDistribution& finite() const {
    if (!is_finite())
      throw DistributionError(
          "operation requires a finitely supported distribution; approximate a "
          "simulation distribution with monte_carlo_finite first");
    return std::get<FiniteDistribution>(v_);
  }

  const PaperSimulation& simulation() const {
    if (is_finite())
      throw DistributionError("distribution is finitely supported, not a simulation");
    return std::get<PaperSimulation>(v_);
  }

  int dim() const {
    return is_finite() ? std::get<FiniteDistribution>(v_).dim()
                       : std::get<PaperSimulation>(v_).p;
  }

  void validate() const {
    if (is_finite())
      std::get<FiniteDistribution>(v_).validate();
    else
      std::get<PaperSimulation>(v_).validate();
  }

 private:
  std::variant<FiniteDistribution, PaperSimulation> v_;
};

// Haar-distributed rotation (uniform on SO(p)): QR of a Gaussian matrix with
// the sign correction that makes R's diagonal positive (Haar on O(p)), then a
// determinant fix by negating the last column when det = -1.
inline Matrix sample_rotation(int p, Rng& rng) {
  if (p < 1) throw DimensionError("sample_rotation: p must be >= 1");
  Matrix g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix v = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j)
    if (r(j, j) < 0.0) v.col(j) = -v.col(j);
  if (v.determinant() < 0.0) v.col(p - 1) = -v.col(p - 1);
  return v;
}

inline Matrix sample_rotation(int p, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_rotation(p, rng);
}

// Draw order is pinned: theta components, then noise_var, then the rotation.
inline TaskParams sample_task(const TaskDistribution& dist, Rng& rng) {
  if (dist.is_finite()) {
    const FiniteDistribution& fin = dist.finite();
    return fin.tasks[fin.draw_index(rng)].params;
  }
  const PaperSimulation& sim = dist.simulation();
  TaskParams t;
  t.theta = Vector(sim.p);
  for (int i = 0; i < sim.p; ++i)
    t.theta(i) = rng.uniform(sim.theta_range.first, sim.theta_range.second);
  t.noise_var = rng.uniform(sim.noise_var_range.first, sim.noise_var_range.second);
  Matrix v = sample_rotation(sim.p, rng);
  t.q = v * t.theta.asDiagonal() * v.transpose();
  t.q = 0.5 * (t.q + t.q.transpose());
  return t;
}

inline TaskParams sample_task(const TaskDistribution& dist, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_task(dist, rng);
}

struct TaskData {
  Matrix x_support;  // p x n
  Matrix x_query;    // p x n
  Vector y_support;  // n
  Vector y_query;    // n
};

struct MetaDataset {
  int p = 0;
  int m = 0;
  int n = 0;
  std::vector<TaskData> tasks;
  std::optional<std::vector<TaskParams>> task_params;  // generating parameters, when known

  void validate() const {
    if (m < 1 || n < 1 || p < 1) throw DimensionError("MetaDataset: need m, n, p >= 1");
    if (static_cast<int>(tasks.size()) != m)
      throw DimensionError("MetaDataset: task count does not match m");
    for (const auto& t : tasks) {
      if (t.x_support.rows() != p || t.x_support.cols() != n ||
          t.x_query.rows() != p || t.x_query.cols() != n ||
          t.y_support.size() != n || t.y_query.size() != n)
        throw DimensionError("MetaDataset: per-task block shapes must be p x n / n");
    }
    if (task_params && static_cast<int>(task_params->size()) != m)
      throw DimensionError("MetaDataset: task_params length does not match m");
  }
};

// m tasks, each with n support and n query observations. Per-task parameter
// and data streams are derived from the master seed by counter, so generation
// is reproducible under any scheduling. Per task the draw order is: support x
// columns, support noise, query x columns, query noise.
inline MetaDataset generate_dataset(const TaskDistribution& dist, int m, int n,
                                    std::uint64_t rng_seed,
                                    bool keep_task_params = true) {
  if (m < 1 || n < 1) throw DimensionError("generate_dataset: need m >= 1 and n >= 1");
  dist.validate();
  MetaDataset data;
  data.p = dist.dim();
  data.m = m;
  data.n = n;
  data.tasks.resize(m);
  if (keep_task_params) data.task_params.emplace();
  const int p = data.p;
  Vector g(p);
  for (int j = 0; j < m; ++j) {
    Rng trng(derive_seed(rng_seed, {0, static_cast<std::uint64_t>(j)}));
    TaskParams tp = sample_task(dist, trng);
    tp.validate();
    const Matrix root = psd_sqrt(tp.q);
    const double sd = std::sqrt(tp.noise_var);
    Rng drng(derive_seed(rng_seed, {1, static_cast<std::uint64_t>(j)}));
    TaskData& td = data.tasks[j];
    auto fill_half = [&](Matrix& x, Vector& y) {
      x.resize(p, n);
      y.resize(n);
      for (int i = 0; i < n; ++i) {
        for (int r = 0; r < p; ++r) g(r) = drng.normal();
        x.col(i) = root * g;
      }
      for (int i = 0; i < n; ++i)
        y(i) = tp.theta.dot(x.col(i)) + sd * drng.normal();
    };
    fill_half(td.x_support, td.y_support);
    fill_half(td.x_query, td.y_query);
    if (keep_task_params) data.task_params->push_back(std::move(tp));
  }
  return data;
}

// Equal-weight Monte Carlo approximation of a simulation distribution by k
// sampled tasks; finite distributions pass through unchanged (they are exact).
inline FiniteDistribution monte_carlo_finite(const TaskDistribution& dist, int k,
                                             std::uint64_t rng_seed) {
  if (dist.is_finite()) return dist.finite();
  if (k < 1) throw DimensionError("monte_carlo_finite: need k >= 1");
  FiniteDistribution fin;
  fin.tasks.reserve(k);
  Rng rng(rng_seed);
  const double w = 1.0 / static_cast<double>(k);
  for (int i = 0; i < k; ++i) fin.tasks.push_back({sample_task(dist, rng), w});
  return fin;
}

}  // namespace mtt
