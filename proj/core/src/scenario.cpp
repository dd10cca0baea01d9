/*
 Copyright 2026 The tpfc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "tpfc/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpfc/mvee.hpp"
#include <json.hpp>

namespace tpfc
{

  namespace
  {
    using nlohmann::json;

    [[noreturn]] void schema_error(const std::string &context, const std::string &what)
    {
      throw std::invalid_argument("scenario: field '" + context + "': " + what);
    }

    const json &require(const json &j, const std::string &key, const std::string &context)
    {
      if (!j.contains(key))
        schema_error(context.empty() ? key : context + "." + key, "missing");
      return j.at(key);
    }

    VectorXd vector_from_json(const json &j, const std::string &context)
    {
      if (!j.is_array())
        schema_error(context, "expected an array of numbers");
      VectorXd v(j.size());
      for (size_t i = 0; i < j.size(); ++i)
      {
        if (!j[i].is_number())
          schema_error(context, "expected an array of numbers");
        v(static_cast<int>(i)) = j[i].get<double>();
      }
      return v;
    }

    // Accepts a flat array (diagonal) or an array of rows (full matrix).
    MatrixXd matrix_from_json(const json &j, const std::string &context)
    {
      if (!j.is_array() || j.empty())
        schema_error(context, "expected a non-empty array (diagonal) or array of rows");
      if (j[0].is_number())
        return vector_from_json(j, context).asDiagonal();
      const size_t rows = j.size();
      const size_t cols = j[0].size();
      MatrixXd m(rows, cols);
      for (size_t r = 0; r < rows; ++r)
      {
        if (!j[r].is_array() || j[r].size() != cols)
          schema_error(context, "ragged matrix rows");
        for (size_t c = 0; c < cols; ++c)
          m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
      }
      return m;
    }

    json vector_to_json(const VectorXd &v)
    {
      json j = json::array();
      for (int i = 0; i < v.size(); ++i)
        j.push_back(v(i));
      return j;
    }

    json matrix_to_json(const MatrixXd &m)
    {
      json j = json::array();
      for (int r = 0; r < m.rows(); ++r)
      {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
          row.push_back(m(r, c));
        j.push_back(row);
      }
      return j;
    }

    void parse_solver(const json &j, SolverConfig &cfg)
    {
      if (j.contains("max_iterations"))
        cfg.max_iterations = j.at("max_iterations").get<int>();
      if (j.contains("stationarity_tol"))
        cfg.stationarity_tol = j.at("stationarity_tol").get<double>();
      if (j.contains("reg_init"))
        cfg.reg_init = j.at("reg_init").get<double>();
      if (j.contains("reg_increase"))
        cfg.reg_increase = j.at("reg_increase").get<double>();
      if (j.contains("reg_decrease"))
        cfg.reg_decrease = j.at("reg_decrease").get<double>();
      if (j.contains("reg_min"))
        cfg.reg_min = j.at("reg_min").get<double>();
      if (j.contains("reg_max"))
        cfg.reg_max = j.at("reg_max").get<double>();
      if (j.contains("ls_backtrack"))
        cfg.ls_backtrack = j.at("ls_backtrack").get<double>();
      if (j.contains("ls_min_step"))
        cfg.ls_min_step = j.at("ls_min_step").get<double>();
      if (j.contains("ls_accept_ratio"))
        cfg.ls_accept_ratio = j.at("ls_accept_ratio").get<double>();
    }

    json solver_to_json(const SolverConfig &cfg)
    {
      return json{{"max_iterations", cfg.max_iterations},
                  {"stationarity_tol", cfg.stationarity_tol},
                  {"reg_init", cfg.reg_init},
                  {"reg_increase", cfg.reg_increase},
                  {"reg_decrease", cfg.reg_decrease},
                  {"reg_min", cfg.reg_min},
                  {"reg_max", cfg.reg_max},
                  {"ls_backtrack", cfg.ls_backtrack},
                  {"ls_min_step", cfg.ls_min_step},
                  {"ls_accept_ratio", cfg.ls_accept_ratio}};
    }

    int model_state_dim(const std::string &id)
    {
      if (id == "car4")
        return 4;
      if (id == "trailer6")
        return 6;
      if (id == "quadrotor12")
        return 12;
      throw std::invalid_argument("scenario: unknown model id '" + id + "'");
    }

    int model_control_dim(const std::string &id)
    {
      return id == "quadrotor12" ? 4 : 2;
    }

  } // namespace

  Scenario scenario_from_json_text(const std::string &text)
  {
    json j;
    try
    {
      j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
      throw std::invalid_argument(std::string("scenario: JSON parse error: ") + e.what());
    }

    Scenario s;
    s.name = j.value("name", "unnamed");

    const json &model = require(j, "model", "");
    s.model_id = require(model, "id", "model").get<std::string>();
    s.dt = require(model, "dt", "model").get<double>();
    if (model.contains("params"))
      for (auto it = model.at("params").begin(); it != model.at("params").end(); ++it)
        s.model_params[it.key()] = it.value().get<double>();
    if (model.contains("mixing"))
    {
      const MatrixXd m = matrix_from_json(model.at("mixing"), "model.mixing");
      if (m.rows() != 4 || m.cols() != 4)
        schema_error("model.mixing", "expected a 4x4 matrix");
      s.quad_mixing = m;
    }

    const int nx = model_state_dim(s.model_id);
    const int nu = model_control_dim(s.model_id);

    s.horizon = require(j, "horizon", "").get<int>();
    if (s.horizon < 1)
      schema_error("horizon", "must be >= 1");
    s.x0 = vector_from_json(require(j, "x0", ""), "x0");
    s.xf = vector_from_json(require(j, "xf", ""), "xf");
    if (s.x0.size() != nx)
      schema_error("x0", "expected length " + std::to_string(nx) + " for model " + s.model_id);
    if (s.xf.size() != nx)
      schema_error("xf", "expected length " + std::to_string(nx) + " for model " + s.model_id);

    if (j.contains("control_bounds"))
    {
      const json &cb = j.at("control_bounds");
      s.u_lower = vector_from_json(require(cb, "lower", "control_bounds"), "control_bounds.lower");
      s.u_upper = vector_from_json(require(cb, "upper", "control_bounds"), "control_bounds.upper");
      if (s.u_lower.size() != nu || s.u_upper.size() != nu)
        schema_error("control_bounds", "expected length " + std::to_string(nu));
      if (!((s.u_lower.array() < s.u_upper.array()).all()))
        schema_error("control_bounds", "lower must be strictly below upper");
    }

    const json &cost = require(j, "cost", "");
    s.Q = matrix_from_json(require(cost, "Q", "cost"), "cost.Q");
    s.Qf = matrix_from_json(require(cost, "Qf", "cost"), "cost.Qf");
    s.R = matrix_from_json(require(cost, "R", "cost"), "cost.R");
    if (s.Q.rows() != nx || s.Qf.rows() != nx)
      schema_error("cost.Q/Qf", "expected " + std::to_string(nx) + "x" + std::to_string(nx));
    if (s.R.rows() != nu)
      schema_error("cost.R", "expected " + std::to_string(nu) + "x" + std::to_string(nu));

    if (cost.contains("obstacles"))
    {
      int idx = 0;
      for (const auto &jo : cost.at("obstacles"))
      {
        const std::string ctx = "cost.obstacles[" + std::to_string(idx) + "]";
        ObstacleSpec spec;
        spec.gamma = jo.value("gamma", spec.gamma);
        spec.rho = jo.value("rho", spec.rho);
        if (jo.contains("position_selector"))
        {
          spec.position_selector.clear();
          for (const auto &v : jo.at("position_selector"))
            spec.position_selector.push_back(v.get<int>());
        }
        for (int sel : spec.position_selector)
          if (sel < 0 || sel >= nx)
            schema_error(ctx + ".position_selector", "index out of range for model " + s.model_id);

        if (jo.contains("polygon"))
        {
          if (spec.position_selector.size() != 2)
            schema_error(ctx, "polygon obstacles need a planar (2-index) position selector");
          MatrixXd pts(2, jo.at("polygon").size());
          int c = 0;
          for (const auto &vertex : jo.at("polygon"))
          {
            const VectorXd v = vector_from_json(vertex, ctx + ".polygon");
            if (v.size() != 2)
              schema_error(ctx + ".polygon", "vertices must be planar points");
            pts.col(c++) = v;
            spec.polygon.emplace_back(v(0), v(1));
          }
          try
          {
            spec.resolved = mvee(pts);
          }
          catch (const std::exception &e)
          {
            schema_error(ctx + ".polygon", e.what());
          }
        }
        else
        {
          spec.center = vector_from_json(require(jo, "center", ctx), ctx + ".center");
          spec.shape = matrix_from_json(require(jo, "shape", ctx), ctx + ".shape");
          if (spec.center.size() != static_cast<int>(spec.position_selector.size()))
            schema_error(ctx + ".center", "dimension must match the position selector");
          try
          {
            spec.resolved = Ellipsoid(spec.center, spec.shape);
          }
          catch (const std::exception &e)
          {
            schema_error(ctx, e.what());
          }
        }
        s.obstacles.push_back(std::move(spec));
        ++idx;
      }
    }

    if (j.contains("solver"))
      parse_solver(j.at("solver"), s.solver);
    s.solver.u_lower = s.u_lower;
    s.solver.u_upper = s.u_upper;

    if (j.contains("replan"))
    {
      s.replan.c_th = j.at("replan").value("c_th", s.replan.c_th);
      s.replan.enabled = j.at("replan").value("enabled", s.replan.enabled);
      if (!(s.replan.c_th > 0.0))
        schema_error("replan.c_th", "must be positive");
    }

    if (j.contains("noise_mode"))
    {
      const std::string mode = j.at("noise_mode").get<std::string>();
      if (mode == "process")
        s.noise_mode = NoiseMode::Process;
      else if (mode == "actuator")
        s.noise_mode = NoiseMode::Actuator;
      else
        schema_error("noise_mode", "expected 'process' or 'actuator'");
    }

    s.tlqr_Q = MatrixXd::Identity(nx, nx);
    s.tlqr_R = MatrixXd::Identity(nu, nu);
    s.tlqr_Qf = MatrixXd::Identity(nx, nx);
    if (j.contains("tlqr"))
    {
      const json &t = j.at("tlqr");
      if (t.contains("Q"))
        s.tlqr_Q = matrix_from_json(t.at("Q"), "tlqr.Q");
      if (t.contains("R"))
        s.tlqr_R = matrix_from_json(t.at("R"), "tlqr.R");
      if (t.contains("Qf"))
        s.tlqr_Qf = matrix_from_json(t.at("Qf"), "tlqr.Qf");
    }

    if (j.contains("seed"))
    {
      const json &seed = j.at("seed");
      if (seed.contains("constant"))
      {
        s.seed_constant = vector_from_json(seed.at("constant"), "seed.constant");
        if (s.seed_constant->size() != nu)
          schema_error("seed.constant", "expected length " + std::to_string(nu));
      }
      else if (seed.contains("file"))
      {
        s.seed_file = seed.at("file").get<std::string>();
      }
      else
      {
        schema_error("seed", "expected 'constant' or 'file'");
      }
    }
    return s;
  }

  std::string scenario_to_json_text(const Scenario &s, int indent)
  {
    json j;
    j["name"] = s.name;
    j["model"] = {{"id", s.model_id}, {"dt", s.dt}};
    if (!s.model_params.empty())
      j["model"]["params"] = s.model_params;
    if (s.quad_mixing)
      j["model"]["mixing"] = matrix_to_json(*s.quad_mixing);
    j["horizon"] = s.horizon;
    j["x0"] = vector_to_json(s.x0);
    j["xf"] = vector_to_json(s.xf);
    if (s.u_lower.size() > 0)
      j["control_bounds"] = {{"lower", vector_to_json(s.u_lower)}, {"upper", vector_to_json(s.u_upper)}};
    j["cost"] = {{"Q", matrix_to_json(s.Q)}, {"Qf", matrix_to_json(s.Qf)}, {"R", matrix_to_json(s.R)}};
    if (!s.obstacles.empty())
    {
      json obs = json::array();
      for (const auto &spec : s.obstacles)
      {
        json jo;
        jo["gamma"] = spec.gamma;
        jo["rho"] = spec.rho;
        jo["position_selector"] = spec.position_selector;
        if (!spec.polygon.empty())
        {
          json poly = json::array();
          for (const auto &v : spec.polygon)
            poly.push_back({v.x(), v.y()});
          jo["polygon"] = poly;
        }
        else
        {
          jo["center"] = vector_to_json(spec.center);
          jo["shape"] = matrix_to_json(spec.shape);
        }
        obs.push_back(std::move(jo));
      }
      j["cost"]["obstacles"] = std::move(obs);
    }
    j["solver"] = solver_to_json(s.solver);
    j["replan"] = {{"c_th", s.replan.c_th}, {"enabled", s.replan.enabled}};
    j["noise_mode"] = s.noise_mode == NoiseMode::Process ? "process" : "actuator";
    j["tlqr"] = {{"Q", matrix_to_json(s.tlqr_Q)},
                 {"R", matrix_to_json(s.tlqr_R)},
                 {"Qf", matrix_to_json(s.tlqr_Qf)}};
    if (s.seed_constant)
      j["seed"] = {{"constant", vector_to_json(*s.seed_constant)}};
    else if (s.seed_file)
      j["seed"] = {{"file", *s.seed_file}};
    return j.dump(indent);
  }

  bool scenario_equal(const Scenario &a, const Scenario &b)
  {
    return json::parse(scenario_to_json_text(a)) == json::parse(scenario_to_json_text(b));
  }

  std::vector<VectorXd> Scenario::seed_controls() const
  {
    if (seed_constant)
      return std::vector<VectorXd>(horizon, *seed_constant);
    if (seed_file)
      return load_control_csv(*seed_file, model_control_dim(model_id));
    return {};
  }

  std::vector<VectorXd> load_control_csv(const std::string &path, int control_dim)
  {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("load_control_csv: cannot open " + path);
    std::vector<VectorXd> controls;
    std::string line;
    while (std::getline(in, line))
    {
      if (line.empty() || line[0] == '#')
        continue;
      std::stringstream row(line);
      std::string cell;
      std::vector<double> values;
      while (std::getline(row, cell, ','))
        values.push_back(std::stod(cell));
      if (static_cast<int>(values.size()) != control_dim)
        throw std::runtime_error("load_control_csv: row " + std::to_string(controls.size()) +
                                 " has " + std::to_string(values.size()) + " columns, expected " +
                                 std::to_string(control_dim));
      controls.push_back(Eigen::Map<VectorXd>(values.data(), control_dim));
    }
    return controls;
  }

  ScenarioRuntime::ScenarioRuntime(const Scenario &scenario) : scenario_(scenario)
  {
    const Eigen::Matrix4d *mixing = scenario_.quad_mixing ? &*scenario_.quad_mixing : nullptr;
    model_ = make_model(scenario_.model_id, scenario_.model_params, scenario_.dt, mixing);

    std::vector<BarrierObstacle> barriers;
    for (const auto &spec : scenario_.obstacles)
      barriers.emplace_back(spec.resolved, spec.gamma, spec.rho, spec.position_selector);
    cost_ = std::make_unique<CostModel>(scenario_.Q, scenario_.Qf, scenario_.R, scenario_.xf,
                                        std::move(barriers));
  }

  SimProblem ScenarioRuntime::problem() const
  {
    SimProblem p;
    p.model = model_.get();
    p.cost = cost_.get();
    p.x0 = scenario_.x0;
    p.horizon = scenario_.horizon;
    p.solver = scenario_.solver;
    p.tlqr_Q = scenario_.tlqr_Q;
    p.tlqr_R = scenario_.tlqr_R;
    p.tlqr_Qf = scenario_.tlqr_Qf;
    p.seed_controls = scenario_.seed_controls();
    return p;
  }

  // ------------------------------------------------------------- presets

  namespace
  {
    const char *kCarPreset = R"json({
  "name": "car4_table2",
  "model": {"id": "car4", "dt": 0.1, "params": {"L": 0.5}},
  "horizon": 229,
  "x0": [0, 0, 0, 0],
  "xf": [5, 5, 0, 0],
  "control_bounds": {"lower": [-0.7, -1.3], "upper": [0.7, 1.3]},
  "cost": {
    "Q": [0.5, 0.5, 0.1, 0.1],
    "Qf": [50, 50, 50, 10],
    "R": [1.0, 0.5],
    "obstacles": [
      {"polygon": [[0.85, 1.95], [1.35, 1.95], [1.35, 2.45], [0.85, 2.45]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[1.95, 0.85], [2.45, 0.85], [2.45, 1.35], [1.95, 1.35]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[1.75, 3.25], [2.25, 3.25], [2.25, 3.75], [1.75, 3.75]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[3.25, 1.75], [3.75, 1.75], [3.75, 2.25], [3.25, 2.25]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[2.75, 4.05], [3.25, 4.05], [3.25, 4.55], [2.75, 4.55]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[4.05, 2.75], [4.55, 2.75], [4.55, 3.25], [4.05, 3.25]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[0.45, 3.55], [0.95, 3.55], [0.95, 4.05], [0.45, 4.05]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[3.55, 0.45], [4.05, 0.45], [4.05, 0.95], [3.55, 0.95]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]}
    ]
  },
  "solver": {"max_iterations": 600, "stationarity_tol": 1e-6},
  "replan": {"c_th": 0.05, "enabled": true},
  "noise_mode": "process",
  "tlqr": {"Q": [1, 1, 1, 1], "R": [1, 1], "Qf": [1, 1, 1, 1]}
})json";

    const char *kTrailerPreset = R"json({
  "name": "trailer6_table2",
  "model": {"id": "trailer6", "dt": 0.1, "params": {"L": 0.5}},
  "horizon": 180,
  "x0": [0, 0, 0, 0, 0, 0],
  "xf": [5, 6, 0, 0, 0, 0],
  "control_bounds": {"lower": [-0.7, -1.3], "upper": [0.7, 1.3]},
  "cost": {
    "Q": [0.5, 0.5, 0.1, 0.1, 0.05, 0.05],
    "Qf": [50, 50, 50, 10, 10, 10],
    "R": [1.0, 0.5],
    "obstacles": [
      {"polygon": [[1.1, 2.6], [1.6, 2.6], [1.6, 3.1], [1.1, 3.1]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[2.6, 1.6], [3.1, 1.6], [3.1, 2.1], [2.6, 2.1]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[2.3, 4.4], [2.8, 4.4], [2.8, 4.9], [2.3, 4.9]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]},
      {"polygon": [[4.0, 3.3], [4.5, 3.3], [4.5, 3.8], [4.0, 3.8]], "gamma": 800, "rho": 2.0, "position_selector": [0, 1]}
    ]
  },
  "solver": {"max_iterations": 600, "stationarity_tol": 1e-6},
  "replan": {"c_th": 0.05, "enabled": true},
  "noise_mode": "process",
  "tlqr": {"Q": [1, 1, 1, 1, 1, 1], "R": [1, 1], "Qf": [1, 1, 1, 1, 1, 1]}
})json";

    const char *kQuadrotorPreset = R"json({
  "name": "quadrotor12_table2",
  "model": {"id": "quadrotor12", "dt": 0.1,
            "params": {"m": 0.5, "k_d": 0.1, "gravity": 9.81,
                       "Ixx": 5e-3, "Iyy": 5e-3, "Izz": 9e-3}},
  "horizon": 60,
  "x0": [0, 0, 0.08, 0, 0, 0, 0, 0, 0, 0, 0, 0],
  "xf": [2.6, 2.4, 1.75, 0, 0, 0, 0, 0, 0, 0, 0, 0],
  "control_bounds": {"lower": [-20, -1, -1, -1], "upper": [20, 1, 1, 1]},
  "cost": {
    "Q": [1, 1, 1, 0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.1, 0.1, 0.1],
    "Qf": [50, 50, 50, 20, 20, 20, 10, 10, 10, 5, 5, 5],
    "R": [0.1, 2, 2, 2],
    "obstacles": [
      {"center": [1.3, 1.2], "shape": [[6.25, 0], [0, 6.25]], "gamma": 500, "rho": 1.0, "position_selector": [0, 1]}
    ]
  },
  "solver": {"max_iterations": 600, "stationarity_tol": 1e-4},
  "replan": {"c_th": 0.05, "enabled": true},
  "noise_mode": "process",
  "tlqr": {"Q": [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1], "R": [1, 1, 1, 1],
           "Qf": [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]},
  "seed": {"constant": [4.905, 0, 0, 0]}
})json";

    const std::map<std::string, const char *> &preset_table()
    {
      static const std::map<std::string, const char *> table = {
          {"car4_table2", kCarPreset},
          {"trailer6_table2", kTrailerPreset},
          {"quadrotor12_table2", kQuadrotorPreset},
      };
      return table;
    }
  } // namespace

  std::vector<std::string> scenario_preset_names()
  {
    std::vector<std::string> names;
    for (const auto &[name, text] : preset_table())
    {
      (void)text;
      names.push_back(name);
    }
    return names;
  }

  bool is_scenario_preset(const std::string &name) { return preset_table().count(name) > 0; }

  Scenario load_scenario(const std::string &source)
  {
    auto it = preset_table().find(source);
    if (it != preset_table().end())
      return scenario_from_json_text(it->second);
    std::ifstream in(source);
    if (!in)
      throw std::runtime_error("load_scenario: '" + source + "' is neither a preset name nor a readable file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json_text(buffer.str());
  }

} // namespace tpfc
