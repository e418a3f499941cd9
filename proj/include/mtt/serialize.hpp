#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtt/experiment.hpp"
#include "mtt/task_model.hpp"

namespace mtt {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form; stable across runs.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vector vector_from_json(const Json& a) {
  if (!a.is_array()) throw ConfigError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

// Matrices are stored as arrays of rows.
inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& rows, Eigen::Index expect_cols = -1) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("expected a JSON array of rows");
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = static_cast<Eigen::Index>(rows[0].size());
  if (expect_cols >= 0 && c != expect_cols) throw DimensionError("matrix column count mismatch");
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != c)
      throw DimensionError("ragged matrix rows in JSON input");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

inline Json task_params_to_json(const TaskParams& t) {
  Json j;
  j["theta"] = vector_to_json(t.theta);
  j["noise_var"] = t.noise_var;
  j["q"] = matrix_to_json(t.q);
  return j;
}

inline TaskParams task_params_from_json(const Json& j) {
  TaskParams t;
  t.theta = vector_from_json(j.at("theta"));
  t.noise_var = j.at("noise_var").get<double>();
  t.q = matrix_from_json(j.at("q"), t.theta.size());
  if (t.q.rows() != t.theta.size()) throw DimensionError("q row count mismatch with theta");
  t.validate();
  return t;
}

inline Json distribution_to_json(const TaskDistribution& dist) {
  Json j;
  if (dist.is_finite()) {
    j["type"] = "finite";
    Json tasks = Json::array();
    for (const auto& wt : dist.finite().tasks) {
      Json t = task_params_to_json(wt.params);
      t["weight"] = wt.weight;
      tasks.push_back(std::move(t));
    }
    j["tasks"] = std::move(tasks);
  } else {
    const PaperSimulation& sim = dist.simulation();
    j["type"] = "simulation";
    j["p"] = sim.p;
    j["theta_range"] = {sim.theta_range.first, sim.theta_range.second};
    j["noise_var_range"] = {sim.noise_var_range.first, sim.noise_var_range.second};
  }
  return j;
}

inline TaskDistribution distribution_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "finite") {
    FiniteDistribution fd;
    for (const Json& t : j.at("tasks")) {
      WeightedTask wt;
      wt.params = task_params_from_json(t);
      wt.weight = t.value("weight", 1.0 / static_cast<double>(j.at("tasks").size()));
      fd.tasks.push_back(std::move(wt));
    }
    TaskDistribution dist(std::move(fd));
    dist.validate();
    return dist;
  }
  if (type == "simulation") {
    PaperSimulation sim;
    sim.p = j.value("p", 1);
    if (j.contains("theta_range"))
      sim.theta_range = {j["theta_range"][0].get<double>(), j["theta_range"][1].get<double>()};
    if (j.contains("noise_var_range"))
      sim.noise_var_range = {j["noise_var_range"][0].get<double>(),
                             j["noise_var_range"][1].get<double>()};
    TaskDistribution dist(sim);
    dist.validate();
    return dist;
  }
  throw ConfigError("distribution type must be \"finite\" or \"simulation\", got \"" + type +
                    "\"");
}

// Datasets: x blocks are arrays of observation rows (n rows of p values).
inline Json dataset_to_json(const MetaDataset& data) {
  data.validate();
  Json j;
  j["p"] = data.p;
  j["m"] = data.m;
  j["n"] = data.n;
  Json tasks = Json::array();
  for (int t = 0; t < data.m; ++t) {
    const TaskData& td = data.tasks[static_cast<std::size_t>(t)];
    Json jt;
    jt["x_support"] = matrix_to_json(td.x_support.transpose());
    jt["y_support"] = vector_to_json(td.y_support);
    jt["x_query"] = matrix_to_json(td.x_query.transpose());
    jt["y_query"] = vector_to_json(td.y_query);
    tasks.push_back(std::move(jt));
  }
  j["tasks"] = std::move(tasks);
  if (data.task_params) {
    Json params = Json::array();
    for (const TaskParams& t : *data.task_params) params.push_back(task_params_to_json(t));
    j["task_params"] = std::move(params);
  }
  return j;
}

inline MetaDataset dataset_from_json(const Json& j) {
  MetaDataset data;
  data.p = j.at("p").get<int>();
  data.m = j.at("m").get<int>();
  data.n = j.at("n").get<int>();
  for (const Json& jt : j.at("tasks")) {
    TaskData td;
    td.x_support = matrix_from_json(jt.at("x_support"), data.p).transpose();
    td.y_support = vector_from_json(jt.at("y_support"));
    td.x_query = matrix_from_json(jt.at("x_query"), data.p).transpose();
    td.y_query = vector_from_json(jt.at("y_query"));
    data.tasks.push_back(std::move(td));
  }
  if (j.contains("task_params")) {
    std::vector<TaskParams> params;
    for (const Json& t : j["task_params"]) params.push_back(task_params_from_json(t));
    data.task_params = std::move(params);
  }
  data.validate();
  return data;
}

inline Json cell_to_json(const CellResult& c) {
  Json j;
  j["m"] = c.m;
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["reps"] = c.reps;
  j["p_pre"] = c.p_maml_better_pre;
  j["p_post"] = c.p_maml_better_post;
  j["stderr_pre"] = c.stderr_pre;
  j["stderr_post"] = c.stderr_post;
  j["degenerate"] = c.degenerate_count;
  j["ties_pre"] = c.ties_pre;
  j["ties_post"] = c.ties_post;
  return j;
}

// CSV with the resolved config embedded as a leading comment line so one file
// carries full provenance. Header matches the documented schema.
inline std::string grid_to_csv(const ExperimentGrid& grid, const Json& resolved_config) {
  std::string out = "# config: " + resolved_config.dump() + "\n";
  out += "m,n,alpha,reps,p_pre,p_post,stderr_pre,stderr_post,degenerate\n";
  for (const CellResult& c : grid.cells) {
    out += std::to_string(c.m) + ',' + std::to_string(c.n) + ',' + format_double(c.alpha) +
           ',' + std::to_string(c.reps) + ',' + format_double(c.p_maml_better_pre) + ',' +
           format_double(c.p_maml_better_post) + ',' + format_double(c.stderr_pre) + ',' +
           format_double(c.stderr_post) + ',' + std::to_string(c.degenerate_count) + '\n';
  }
  return out;
}

inline Json grid_to_json(const ExperimentGrid& grid, const Json& resolved_config) {
  Json j;
  j["config"] = resolved_config;
  Json cells = Json::array();
  for (const CellResult& c : grid.cells) cells.push_back(cell_to_json(c));
  j["cells"] = std::move(cells);
  return j;
}

}  // namespace mtt
