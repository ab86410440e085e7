#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace peelkit::verify {

struct ModelRef {
  std::string preset = "budd-o2-example";
  long L_max = 4096;
};

struct ExperimentConfig {
  std::string experiment;
  std::vector<long> ladder;        // strictly increasing perimeters
  long replicates = 1000;          // discrete replicates per ladder rung
  std::vector<double> grid;        // rescaled times
  double primary_t = 0.0;          // grid time the gates read
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> params;  // experiment-specific knobs
  ModelRef model;
  long continuum_replicates = 10000;
  int bootstrap = 200;
  int threads = 0;                 // 0: OpenMP default
  std::string cache_dir;           // empty: no continuum cache

  double tol(const std::string& key) const;
  double param(const std::string& key) const;
  double param(const std::string& key, double fallback) const;

  /// Throws std::invalid_argument on a malformed configuration.
  void validate() const;
};

/// Known experiment ids, in report order.
const std::vector<std::string>& experiment_ids();

/// Default configuration of an experiment.
ExperimentConfig default_config(const std::string& id);

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// Reads a JSON file holding either one configuration or an object with an
/// "experiments" array. Missing fields keep the defaults of the named experiment.
std::vector<ExperimentConfig> load_configs(const std::string& path);

}  // namespace peelkit::verify
