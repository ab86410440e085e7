#include "peelkit/verify/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace peelkit::verify {

using nlohmann::json;
using nlohmann::ordered_json;

double ExperimentConfig::tol(const std::string& key) const {
  const auto it = tolerances.find(key);
  if (it == tolerances.end()) throw std::invalid_argument(experiment + ": missing tolerance '" + key + "'");
  return it->second;
}

double ExperimentConfig::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument(experiment + ": missing parameter '" + key + "'");
  return it->second;
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void ExperimentConfig::validate() const {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), experiment) == ids.end()) {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  if (ladder.empty()) throw std::invalid_argument(experiment + ": empty perimeter ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw std::invalid_argument(experiment + ": ladder entries must be >= 1");
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw std::invalid_argument(experiment + ": ladder not strictly increasing");
  }
  if (replicates < 100) throw std::invalid_argument(experiment + ": replicates must be >= 100");
  if (continuum_replicates < 100) throw std::invalid_argument(experiment + ": continuum replicates must be >= 100");
  if (grid.empty()) throw std::invalid_argument(experiment + ": empty time grid");
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 0.0) {
    throw std::invalid_argument(experiment + ": time grid must be sorted and >= 0");
  }
  if (std::find(grid.begin(), grid.end(), primary_t) == grid.end()) {
    throw std::invalid_argument(experiment + ": primary_t must be a grid time");
  }
  if (bootstrap < 0) throw std::invalid_argument(experiment + ": bootstrap must be >= 0");
  if (model.L_max < 32) throw std::invalid_argument(experiment + ": model L_max must be >= 32");
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"perimeter_finite", "perimeter_infinite", "fpp",
                                            "height",           "joint_faces",        "ball_perimeters",
                                            "lamperti_identity", "self_similarity"};
  return ids;
}

ExperimentConfig default_config(const std::string& id) {
  ExperimentConfig c;
  c.experiment = id;
  c.seed = 20240917;
  if (id == "perimeter_finite") {
    c.ladder = {256, 1024, 4096};
    c.replicates = 5000;
    c.grid = {0.0, 0.125, 0.25, 0.5};
    c.primary_t = 0.25;
    c.tolerances = {{"final_ks", 0.08}, {"absorption_ks", 0.08}, {"kendall_tau", 0.0}};
    c.continuum_replicates = 40000;
    c.params = {{"eps_cut", 0.01}};
  } else if (id == "perimeter_infinite") {
    c.ladder = {256, 1024, 4096};
    c.replicates = 5000;
    c.grid = {0.0, 0.5, 1.0, 2.0};
    c.primary_t = 1.0;
    c.tolerances = {{"final_ks", 0.1}, {"kendall_tau", 0.0}, {"ess_fraction", 0.3}};
    c.continuum_replicates = 40000;
    c.params = {{"eps_cut", 0.01}};
  } else if (id == "fpp") {
    c.ladder = {256, 1024, 4096};
    c.replicates = 5000;
    c.grid = {0.0, 0.125, 0.25, 0.5};
    c.primary_t = 0.25;
    c.tolerances = {{"final_ks", 0.08}};
    c.continuum_replicates = 40000;
    c.params = {{"eps_cut", 0.01}};
  } else if (id == "height") {
    c.ladder = {256, 512, 1024, 2048, 4096, 8192, 16384};
    c.replicates = 2000;
    c.grid = {0.0, 0.25, 0.5};
    c.primary_t = 0.5;
    c.tolerances = {{"median_gap", 0.25}, {"kendall_tau", 0.0}};
    c.continuum_replicates = 40000;
    c.params = {{"eps_cut", 0.01}, {"allow_trend_only", 1.0}};
  } else if (id == "joint_faces") {
    c.ladder = {256, 1024, 4096};
    c.replicates = 2000;
    c.grid = {1.0};
    c.primary_t = 1.0;
    c.tolerances = {{"degree_ks", 0.1}, {"time_ks", 0.1}};
    c.continuum_replicates = 4000;
    c.params = {{"eps_cut", 0.01}, {"cutoff_divisor", 64}, {"ranks", 3}};
  } else if (id == "ball_perimeters") {
    c.ladder = {256, 1024, 4096};
    c.replicates = 2000;
    c.grid = {0.0, 0.25, 0.5};
    c.primary_t = 0.5;
    c.tolerances = {{"rank1_ks", 0.12}};
    c.continuum_replicates = 4000;
    c.params = {{"eps_cut", 0.01}, {"cutoff_divisor", 128}, {"ranks", 3}};
  } else if (id == "lamperti_identity") {
    c.ladder = {1};
    c.replicates = 10000;
    c.grid = {0.5};
    c.primary_t = 0.5;
    c.tolerances = {{"mean_lo", 0.45}, {"mean_hi", 0.55}};
    c.continuum_replicates = 10000;
    c.params = {{"eps", 1e-3}, {"eps_cut_ratio", 0.125}};
  } else if (id == "self_similarity") {
    c.ladder = {1};
    c.replicates = 10000;
    c.grid = {0.25, 0.5, 1.0, 2.0};
    c.primary_t = 1.0;
    c.tolerances = {{"max_ks", 0.05}};
    c.continuum_replicates = 10000;
    c.params = {{"eps_cut", 0.01}, {"start", 2.0}};
  } else {
    throw std::invalid_argument("unknown experiment '" + id + "'");
  }
  return c;
}

namespace {

ExperimentConfig from_json_object(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment configuration must be a JSON object");
  if (!j.contains("experiment")) throw std::invalid_argument("configuration lacks 'experiment'");
  ExperimentConfig c = default_config(j.at("experiment").get<std::string>());
  if (j.contains("ladder")) c.ladder = j.at("ladder").get<std::vector<long>>();
  if (j.contains("replicates")) c.replicates = j.at("replicates").get<long>();
  if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<double>>();
  if (j.contains("primary_t")) c.primary_t = j.at("primary_t").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tolerances")) {
    for (const auto& [k, v] : j.at("tolerances").items()) c.tolerances[k] = v.get<double>();
  }
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) c.params[k] = v.get<double>();
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    if (m.contains("preset")) c.model.preset = m.at("preset").get<std::string>();
    if (m.contains("L_max")) c.model.L_max = m.at("L_max").get<long>();
  }
  if (j.contains("continuum_replicates")) c.continuum_replicates = j.at("continuum_replicates").get<long>();
  if (j.contains("bootstrap")) c.bootstrap = j.at("bootstrap").get<int>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) { return from_json_object(json::parse(text)); }

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = c.experiment;
  j["ladder"] = c.ladder;
  j["replicates"] = c.replicates;
  j["grid"] = c.grid;
  j["primary_t"] = c.primary_t;
  j["seed"] = c.seed;
  j["tolerances"] = c.tolerances;
  j["params"] = c.params;
  j["model"] = {{"preset", c.model.preset}, {"L_max", c.model.L_max}};
  j["continuum_replicates"] = c.continuum_replicates;
  j["bootstrap"] = c.bootstrap;
  j["threads"] = c.threads;
  j["cache_dir"] = c.cache_dir;
  return j.dump(2);
}

std::vector<ExperimentConfig> load_configs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const json j = json::parse(ss.str());
  std::vector<ExperimentConfig> out;
  if (j.contains("experiments")) {
    for (const json& e : j.at("experiments")) out.push_back(from_json_object(e));
  } else {
    out.push_back(from_json_object(j));
  }
  return out;
}

}  // namespace peelkit::verify
