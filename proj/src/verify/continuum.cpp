#include "peelkit/verify/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "peelkit/levy/doob.hpp"
#include "peelkit/levy/growth_fragmentation.hpp"
#include "peelkit/levy/lamperti.hpp"

namespace peelkit::verify {

using nlohmann::ordered_json;

const std::vector<double>& ColumnSet::at(const std::string& name) const {
  const auto it = columns.find(name);
  if (it == columns.end()) throw std::out_of_range("no continuum column '" + name + "'");
  return it->second;
}

std::size_t ColumnSet::rows() const { return columns.empty() ? 0 : columns.begin()->second.size(); }

std::string encode_columns(const ColumnSet& set, const std::string& key) {
  ordered_json j;
  j["key"] = key;
  ordered_json cols = ordered_json::object();
  for (const auto& [name, v] : set.columns) {
    ordered_json arr = ordered_json::array();
    for (double x : v) {
      if (std::isnan(x)) throw std::invalid_argument("NaN in continuum column '" + name + "'");
      if (std::isinf(x)) {
        if (x < 0.0) throw std::invalid_argument("-inf in continuum column '" + name + "'");
        arr.push_back(nullptr);
      } else {
        arr.push_back(x);
      }
    }
    cols[name] = std::move(arr);
  }
  j["columns"] = std::move(cols);
  return j.dump();
}

ColumnSet decode_columns(const std::string& text, const std::string& expected_key) {
  const ordered_json j = ordered_json::parse(text);
  if (j.at("key").get<std::string>() != expected_key) throw std::runtime_error("continuum cache key mismatch");
  ColumnSet set;
  for (const auto& [name, arr] : j.at("columns").items()) {
    std::vector<double>& v = set.columns[name];
    v.reserve(arr.size());
    for (const auto& x : arr) v.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
  }
  return set;
}

std::string ContinuumCache::key(const std::string& process, const std::string& params, std::uint64_t seed) {
  return process + "|" + params + "|" + std::to_string(seed);
}

ColumnSet ContinuumCache::get_or_compute(const std::string& process, const std::string& params, std::uint64_t seed,
                                         const std::function<ColumnSet()>& compute) const {
  if (dir_.empty()) return compute();
  const std::string k = key(process, params, seed);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx", static_cast<unsigned long long>(hash_name(k)));
  const std::filesystem::path file = std::filesystem::path(dir_) / (process + "-" + name + ".json");
  if (std::filesystem::exists(file)) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return decode_columns(ss.str(), k);
  }
  ColumnSet set = compute();
  std::filesystem::create_directories(dir_);
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << encode_columns(set, k);
    if (!out) throw std::runtime_error("cannot write continuum cache " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
  return set;
}

namespace {

std::string idx(const std::string& prefix, std::size_t i) { return prefix + "_" + std::to_string(i); }

void allocate(ColumnSet& set, const std::vector<std::string>& names, std::size_t n) {
  for (const std::string& name : names) set[name].assign(n, 0.0);
}

}  // namespace

ColumnSet lamperti_ensemble(double x, const std::vector<double>& times, double eps_cut, const EnsembleRun& run) {
  ColumnSet set;
  std::vector<std::string> names{"zeta"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    names.push_back(idx("value", i));
    names.push_back(idx("tau", i));
  }
  allocate(set, names, run.n);
  std::vector<std::vector<double>*> value(times.size());
  std::vector<std::vector<double>*> tau(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    value[i] = &set[idx("value", i)];
    tau[i] = &set[idx("tau", i)];
  }
  std::vector<double>* zeta = &set["zeta"];
  run_replicates(
      run.n,
      [&](std::size_t r) {
        Rng rng = Rng::stream(run.seed, hash_name("lamperti"), r);
        levy::LampertiOptions opt;
        opt.eps_cut = eps_cut;
        opt.need_zeta = true;
        const levy::LampertiResult res = levy::sample_lamperti(-1.0, x, times, rng, opt);
        if (res.hit_limit) throw std::runtime_error("Lamperti path hit the xi-time limit");
        for (std::size_t i = 0; i < times.size(); ++i) {
          (*value[i])[r] = res.values[i];
          (*tau[i])[r] = res.tau[i];
        }
        (*zeta)[r] = res.zeta;
      },
      run.exec, run.threads);
  return set;
}

ColumnSet upsilon_ensemble(const std::vector<double>& times, double eps_cut, const EnsembleRun& run) {
  if (times.empty()) throw std::invalid_argument("upsilon ensemble needs times");
  ColumnSet set;
  std::vector<std::string> names{"weight"};
  for (std::size_t i = 0; i < times.size(); ++i) names.push_back(idx("value", i));
  allocate(set, names, run.n);
  std::vector<std::vector<double>*> value(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) value[i] = &set[idx("value", i)];
  std::vector<double>* weight = &set["weight"];
  run_replicates(
      run.n,
      [&](std::size_t r) {
        Rng rng = Rng::stream(run.seed, hash_name("upsilon"), r);
        const levy::JumpPath p = levy::sample_cauchy(1.0, times.back(), eps_cut, rng, false);
        for (std::size_t i = 0; i < times.size(); ++i) (*value[i])[r] = p.value(times[i]);
        (*weight)[r] = p.infimum() > 0.0 ? std::sqrt(p.terminal()) : 0.0;
      },
      run.exec, run.threads);
  double total = 0.0;
  for (double w : *weight) total += w;
  if (!(total > 0.0)) throw std::runtime_error("upsilon ensemble: all weights zero");
  return set;
}

ColumnSet gf_jump_ensemble(double delta, int ranks, double eps_cut, const EnsembleRun& run) {
  ColumnSet set;
  std::vector<std::string> names;
  for (int k = 1; k <= ranks; ++k) {
    names.push_back(idx("size", k));
    names.push_back(idx("ytime", k));
    names.push_back(idx("distance", k));
  }
  allocate(set, names, run.n);
  run_replicates(
      run.n,
      [&](std::size_t r) {
        Rng rng = Rng::stream(run.seed, hash_name("gf_jumps"), r);
        levy::GFOptions opt;
        opt.eps_cut = eps_cut;
        opt.full_lifetime = true;
        const levy::GFResult gf = levy::growth_fragmentation(1.0, -1.0, {}, delta, rng, opt);
        struct Up {
          double size, ytime, distance;
        };
        std::vector<Up> ups;
        for (const levy::GFCell& c : gf.cells) {
          for (const levy::XJump& j : c.jumps) {
            if (j.size >= delta) {
              ups.push_back({j.size, (c.birth_time + j.t) / std::numbers::pi,
                             (c.birth_distance + j.xi_time) / std::numbers::pi});
            }
          }
        }
        std::sort(ups.begin(), ups.end(), [](const Up& a, const Up& b) { return a.size > b.size; });
        for (int k = 1; k <= ranks && k <= static_cast<int>(ups.size()); ++k) {
          set.columns.find(idx("size", k))->second[r] = ups[k - 1].size;
          set.columns.find(idx("ytime", k))->second[r] = ups[k - 1].ytime;
          set.columns.find(idx("distance", k))->second[r] = ups[k - 1].distance;
        }
      },
      run.exec, run.threads);
  return set;
}

ColumnSet gf_rank_ensemble(const std::vector<double>& times, double delta, int ranks, double eps_cut,
                           const EnsembleRun& run) {
  ColumnSet set;
  std::vector<std::string> names;
  for (int k = 1; k <= ranks; ++k) {
    for (std::size_t i = 0; i < times.size(); ++i) names.push_back("rank_" + std::to_string(k) + "_" + std::to_string(i));
  }
  allocate(set, names, run.n);
  run_replicates(
      run.n,
      [&](std::size_t r) {
        Rng rng = Rng::stream(run.seed, hash_name("gf_ranks"), r);
        levy::GFOptions opt;
        opt.eps_cut = eps_cut;
        const levy::GFResult gf = levy::growth_fragmentation(1.0, 0.0, times, delta, rng, opt);
        for (std::size_t i = 0; i < times.size(); ++i) {
          const std::vector<double>& sizes = gf.states[i].sizes;
          for (int k = 1; k <= ranks && k <= static_cast<int>(sizes.size()); ++k) {
            set.columns.find("rank_" + std::to_string(k) + "_" + std::to_string(i))->second[r] = sizes[k - 1];
          }
        }
      },
      run.exec, run.threads);
  return set;
}

}  // namespace peelkit::verify
