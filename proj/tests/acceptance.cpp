// Acceptance runner: one PASS/FAIL line per criterion. Tolerances and time
// budgets are pinned here and override whatever the default configs carry.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "peelkit/boltzmann/partition.hpp"
#include "peelkit/boltzmann/step_law.hpp"
#include "peelkit/peeling/boundary.hpp"
#include "peelkit/rng.hpp"
#include "peelkit/verify/config.hpp"
#include "peelkit/verify/experiments.hpp"
#include "peelkit/verify/report.hpp"

namespace fs = std::filesystem;
using namespace peelkit;
using namespace peelkit::boltzmann;
using namespace peelkit::verify;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kModelResidual = 1e-9;
constexpr double kModelDrift = 1e-3;
constexpr double kModelSeconds = 60.0;
constexpr double kHarmonicTol = 1e-6;
constexpr long kHarmonicMax = 64;
constexpr long kInvariantSteps = 1'000'000;
constexpr double kInvariantSeconds = 30.0;
constexpr double kLampertiLo = 0.45;
constexpr double kLampertiHi = 0.55;
constexpr double kLampertiSeconds = 300.0;
constexpr double kSelfSimilarityKs = 0.05;
constexpr double kPerimeterKs = 0.08;
constexpr double kPerimeterSeconds = 900.0;
constexpr double kFppKs = 0.08;
constexpr double kHeightGap = 0.25;
constexpr double kHeightSeconds = 2700.0;
constexpr double kBallKs = 0.12;
constexpr double kDegreeKs = 0.1;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string cache_dir;
  std::string out_dir;
  int threads = 0;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string gate_summary(const ExperimentResult& r) {
  std::string s;
  for (const Gate& g : r.gates) {
    if (!s.empty()) s += ", ";
    s += g.name + "=" + fmt("%.4g", g.value) + (g.pass ? "" : (g.advisory ? " (advisory)" : " (fail)"));
  }
  return s;
}

ExperimentResult run_default(const std::string& id, const Options& opt,
                             const std::function<void(ExperimentConfig&)>& pin) {
  ExperimentConfig c = default_config(id);
  c.cache_dir = opt.cache_dir;
  c.threads = opt.threads;
  pin(c);
  ExperimentResult r = run_experiment(c, {Execution::parallel, &std::cerr});
  if (!opt.out_dir.empty()) {
    fs::create_directories(opt.out_dir);
    write_result(r, opt.out_dir);
  }
  return r;
}

Verdict experiment_verdict(const ExperimentResult& r, double budget_seconds = 0.0) {
  Verdict v;
  v.pass = r.pass();
  v.detail = gate_summary(r) + ", " + fmt("%.1f s", r.wall_time);
  if (budget_seconds > 0.0 && r.wall_time >= budget_seconds) {
    v.pass = false;
    v.detail += " over budget " + fmt("%.0f s", budget_seconds);
  }
  return v;
}

Verdict model_consistency(const Options&) {
  const auto t0 = Clock::now();
  const WeightSequence q = WeightSequence::preset("budd-o2-example");
  const PartitionTable a = solve_partition_function(q, 256);
  const PartitionTable b = solve_partition_function(q, 512);
  const double res = std::max(a.residual(), tutte_residual(a, 256));
  const double dc = std::abs(b.c() - a.c()) / a.c();
  const double dp = std::abs(b.p() - a.p()) / a.p();
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = res <= kModelResidual && dc < kModelDrift && dp < kModelDrift && secs < kModelSeconds;
  v.detail = "residual=" + fmt("%.2e", res) + ", c drift=" + fmt("%.2e", dc) + ", p drift=" + fmt("%.2e", dp) +
             ", " + fmt("%.1f s", secs);
  return v;
}

Verdict harmonicity(const Options&) {
  const PeelingModel model(solve_partition_function(WeightSequence::preset("budd-o2-example"), 256));
  double worst = 0.0;
  for (long p = 1; p <= kHarmonicMax; ++p) {
    const StepLaw law = transition_law(model, Mode::infinite, p);
    worst = std::max(worst, std::abs(law.swallow_mass() + law.growth_tail(0) - 1.0));
  }
  return {worst <= kHarmonicTol, "max |Ph/h - 1| over p<=64 = " + fmt("%.2e", worst)};
}

Verdict peeling_invariants(const Options&) {
  using namespace peelkit::peeling;
  const PeelingModel model(solve_partition_function(WeightSequence::preset("budd-o2-example"), 256));
  const auto t0 = Clock::now();
  Rng rng(77);
  long steps = 0, hyp = 0, book = 0, height = 0, runs = 0;
  while (steps < kInvariantSteps) {
    const Mode mode = runs % 2 == 0 ? Mode::finite : Mode::infinite;
    const long ell = 1 + static_cast<long>(rng.uniform() * 64.0);
    ++runs;
    LayeredBoundary st = LayeredBoundary::root(ell);
    ExplicitBoundary ex(ell);
    while (steps < kInvariantSteps) {
      const PeelEvent e = transition_law(model, mode, st.p).sample(rng);
      if (e.kind == PeelEvent::Kind::C && st.p + e.param > 2000) break;
      const auto [next, out] = peel_step(st, e, mode);
      const StepOutcome o2 = ex.apply(e, mode);
      ++steps;
      if (out.height_increment != o2.height_increment || out.absorbed != o2.absorbed) ++book;
      if (out.height_increment < 0 || out.height_increment > 1 || next.h != st.h + out.height_increment) ++height;
      st = next;
      if (st.absorbed()) break;
      if (static_cast<long>(ex.labels().size()) != 2 * st.p || ex.p() != st.p || st.word() != ex.labels()) ++book;
      if (!ex.low_arc_contiguous() || ex.low_count() != st.m || st.m < 1 || st.m > 2 * st.p) ++hyp;
      if (ex.h() != st.h) ++height;
    }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = hyp == 0 && book == 0 && height == 0 && secs < kInvariantSeconds;
  v.detail = std::to_string(steps) + " steps over " + std::to_string(runs) + " runs, (H) violations=" +
             std::to_string(hyp) + ", bookkeeping=" + std::to_string(book) + ", height=" + std::to_string(height) +
             ", " + fmt("%.1f s", secs);
  return v;
}

Verdict lamperti_identity(const Options& opt) {
  const ExperimentResult r = run_default("lamperti_identity", opt, [](ExperimentConfig& c) {
    c.tolerances["mean_lo"] = kLampertiLo;
    c.tolerances["mean_hi"] = kLampertiHi;
  });
  return experiment_verdict(r, kLampertiSeconds);
}

Verdict self_similarity(const Options& opt) {
  const ExperimentResult r =
      run_default("self_similarity", opt, [](ExperimentConfig& c) { c.tolerances["max_ks"] = kSelfSimilarityKs; });
  return experiment_verdict(r);
}

Verdict perimeter_finite(const Options& opt) {
  const ExperimentResult r = run_default("perimeter_finite", opt, [](ExperimentConfig& c) {
    c.tolerances["final_ks"] = kPerimeterKs;
    c.tolerances["absorption_ks"] = kPerimeterKs;
    c.tolerances["kendall_tau"] = 0.0;
  });
  return experiment_verdict(r, kPerimeterSeconds);
}

Verdict fpp(const Options& opt) {
  const ExperimentResult r = run_default("fpp", opt, [](ExperimentConfig& c) { c.tolerances["final_ks"] = kFppKs; });
  return experiment_verdict(r);
}

Verdict height(const Options& opt) {
  const ExperimentResult r = run_default("height", opt, [](ExperimentConfig& c) {
    c.tolerances["median_gap"] = kHeightGap;
    c.tolerances["kendall_tau"] = 0.0;
  });
  return experiment_verdict(r, kHeightSeconds);
}

Verdict ball_perimeters(const Options& opt) {
  const ExperimentResult r =
      run_default("ball_perimeters", opt, [](ExperimentConfig& c) { c.tolerances["rank1_ks"] = kBallKs; });
  return experiment_verdict(r);
}

Verdict joint_faces(const Options& opt) {
  const ExperimentResult r = run_default("joint_faces", opt, [](ExperimentConfig& c) {
    c.tolerances["degree_ks"] = kDegreeKs;
    c.tolerances["time_ks"] = kDegreeKs;
  });
  return experiment_verdict(r);
}

std::vector<std::string> csv_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism(const Options&) {
  // Reduced configs, no cache: one serial run and one parallel run per experiment.
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c = default_config("perimeter_finite");
    c.ladder = {64, 256};
    c.replicates = 400;
    c.continuum_replicates = 2000;
    c.bootstrap = 50;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("ball_perimeters");
    c.ladder = {64, 256};
    c.replicates = 200;
    c.continuum_replicates = 300;
    c.bootstrap = 50;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config("self_similarity");
    c.replicates = 1000;
    c.continuum_replicates = 1000;
    c.bootstrap = 50;
    configs.push_back(c);
  }
  const fs::path root = fs::temp_directory_path() / ("peelkit_determinism_" + std::to_string(::getpid()));
  long files = 0, differing = 0;
  for (const ExperimentConfig& base : configs) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      ExperimentConfig c = base;
      c.threads = run == 0 ? 1 : 3;
      const fs::path dir = root / (base.experiment + "_" + std::to_string(run));
      fs::create_directories(dir);
      write_result(run_experiment(c, {run == 0 ? Execution::serial : Execution::parallel, nullptr}), dir.string());
      dirs.push_back(dir);
    }
    const auto a = csv_files(dirs[0]), b = csv_files(dirs[1]);
    if (a != b) ++differing;
    for (const std::string& f : a) {
      ++files;
      if (slurp(dirs[0] / f) != slurp(dirs[1] / f)) ++differing;
    }
  }
  fs::remove_all(root);
  return {differing == 0 && files > 0,
          std::to_string(files) + " CSV files compared serial vs 3 threads, " + std::to_string(differing) +
              " differ"};
}

struct Criterion {
  std::string name;
  Verdict (*run)(const Options&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"model_consistency", model_consistency},
      {"harmonicity", harmonicity},
      {"peeling_invariants", peeling_invariants},
      {"lamperti_identity", lamperti_identity},
      {"self_similarity", self_similarity},
      {"perimeter_finite", perimeter_finite},
      {"fpp", fpp},
      {"height", height},
      {"ball_perimeters", ball_perimeters},
      {"joint_faces", joint_faces},
      {"determinism", determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peelkit acceptance criteria"};
  Options opt;
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "Run only the named criteria");
  app.add_option("--cache", opt.cache_dir, "Continuum sample cache directory");
  app.add_option("--out", opt.out_dir, "Write experiment CSVs and verdicts here");
  app.add_option("--threads", opt.threads, "Worker threads (0: OpenMP default)");
  app.add_flag("--list", list, "Print criterion names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const Criterion& c : criteria()) std::cout << c.name << '\n';
    return 0;
  }
  for (const std::string& name : only) {
    bool known = false;
    for (const Criterion& c : criteria()) known = known || c.name == name;
    if (!known) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
  }

  int failures = 0;
  for (const Criterion& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Verdict v;
    try {
      v = c.run(opt);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
