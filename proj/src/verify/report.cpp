#include "peelkit/verify/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "peelkit/verify/stats.hpp"

namespace peelkit::verify {

bool ExperimentResult::pass() const {
  bool any = false;
  for (const Gate& g : gates) {
    if (g.advisory) continue;
    if (!g.pass) return false;
    any = true;
  }
  return any;
}

const Gate& ExperimentResult::gate(const std::string& name) const {
  for (const Gate& g : gates) {
    if (g.name == name) return g;
  }
  throw std::out_of_range(id + ": no gate '" + name + "'");
}

namespace {

void put(std::ostream& out, double x) {
  if (std::isnan(x)) return;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  out << buf;
}

}  // namespace

void write_summary_csv(const Observable& obs, std::ostream& out) {
  out << "ell,t,ks,ks_ci_lo,ks_ci_hi";
  for (double level : kQuantileLevels) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ",q%02d", static_cast<int>(std::lround(level * 100)));
    out << buf;
  }
  out << ",n,ess\n";
  for (const SummaryRow& r : obs.rows) {
    out << r.ell << ',';
    put(out, r.t);
    for (double x : {r.ks, r.ks_lo, r.ks_hi}) {
      out << ',';
      put(out, x);
    }
    for (double x : r.q) {
      out << ',';
      put(out, x);
    }
    out << ',' << r.n << ',';
    put(out, r.ess);
    out << '\n';
  }
}

nlohmann::ordered_json verdict_json(const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = result.id;
  j["pass"] = result.pass();
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  for (const Gate& g : result.gates) {
    nlohmann::ordered_json gj;
    gj["name"] = g.name;
    gj["value"] = std::isfinite(g.value) ? nlohmann::ordered_json(g.value) : nlohmann::ordered_json(nullptr);
    gj["relation"] = g.relation;
    gj["threshold"] = g.threshold;
    if (g.relation == "in") gj["threshold_hi"] = g.threshold_hi;
    gj["pass"] = g.pass;
    if (g.advisory) gj["advisory"] = true;
    if (!g.note.empty()) gj["note"] = g.note;
    gates.push_back(gj);
  }
  nlohmann::ordered_json details = result.details;
  details["gates"] = gates;
  details["wall_time_s"] = result.wall_time;
  j["details"] = details;
  return j;
}

void write_result(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < result.observables.size(); ++i) {
    const Observable& obs = result.observables[i];
    const std::string name = i == 0 ? result.id + ".csv" : result.id + "." + obs.name + ".csv";
    std::ofstream out(std::filesystem::path(dir) / name);
    write_summary_csv(obs, out);
    if (!out) throw std::runtime_error("cannot write " + name);
  }
  std::ofstream out(std::filesystem::path(dir) / (result.id + ".verdict.json"));
  out << verdict_json(result).dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write verdict for " + result.id);
}

Gate make_gate(const std::string& name, double value, const std::string& relation, double threshold,
               std::string note) {
  Gate g;
  g.name = name;
  g.value = value;
  g.relation = relation;
  g.threshold = threshold;
  g.note = std::move(note);
  if (relation == "<") {
    g.pass = value < threshold;
  } else if (relation == "<=") {
    g.pass = value <= threshold;
  } else if (relation == ">=") {
    g.pass = value >= threshold;
  } else {
    throw std::invalid_argument("unknown gate relation " + relation);
  }
  return g;
}

Gate make_range_gate(const std::string& name, double value, double lo, double hi, std::string note) {
  Gate g;
  g.name = name;
  g.value = value;
  g.relation = "in";
  g.threshold = lo;
  g.threshold_hi = hi;
  g.pass = value >= lo && value <= hi;
  g.note = std::move(note);
  return g;
}

}  // namespace peelkit::verify
