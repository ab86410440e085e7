// Command-line front end: model solve, peel run, levy sample, verify.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "peelkit/boltzmann/partition.hpp"
#include "peelkit/boltzmann/step_law.hpp"
#include "peelkit/levy/doob.hpp"
#include "peelkit/levy/growth_fragmentation.hpp"
#include "peelkit/levy/jump_path.hpp"
#include "peelkit/levy/lamperti.hpp"
#include "peelkit/peeling/cell_system.hpp"
#include "peelkit/peeling/exploration.hpp"
#include "peelkit/verify/config.hpp"
#include "peelkit/verify/experiments.hpp"

using namespace peelkit;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Writes to `path`, or stdout for "" or "-".
template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write(out);
}

boltzmann::WeightSequence load_weights(const std::string& preset, const std::string& table_path) {
  if (table_path.empty()) return boltzmann::WeightSequence::preset(preset);
  std::ifstream in(table_path);
  if (!in) throw std::runtime_error("cannot open weight table " + table_path);
  const nlohmann::json j = nlohmann::json::parse(in);
  std::map<long, double> entries;
  for (const auto& [k, v] : j.items()) entries[std::stol(k)] = v.get<double>();
  return boltzmann::WeightSequence::from_table(entries);
}

std::vector<double> parse_grid(const std::string& text, double horizon) {
  std::vector<double> grid;
  if (text.empty()) {
    for (int i = 0; i <= 200; ++i) grid.push_back(horizon * i / 200.0);
    return grid;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
  return grid;
}

void write_knots(const levy::JumpPath& path, std::ostream& out) {
  out << "time,value\n";
  out << "0," << fmt(path.start) << '\n';
  for (const levy::Jump& j : path.jumps) {
    out << fmt(j.time) << ',' << fmt(path.left_limit(j.time)) << '\n';
    out << fmt(j.time) << ',' << fmt(path.value(j.time)) << '\n';
  }
  out << fmt(path.horizon) << ',' << fmt(path.terminal()) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peelkit: peeling explorations of Boltzmann maps and their continuum limits"};
  app.require_subcommand(1);

  // model solve
  CLI::App* model = app.add_subcommand("model", "Boltzmann map model");
  model->require_subcommand(1);
  CLI::App* solve = model->add_subcommand("solve", "solve the partition function");
  std::string preset = "budd-o2-example";
  std::string table_path;
  long L_max = 256;
  double tol = 1e-9;
  int max_iter = 200;
  std::string model_out;
  solve->add_option("--preset", preset, "weight preset");
  solve->add_option("--table", table_path, "JSON object {k: q_k} instead of a preset");
  solve->add_option("--L-max", L_max, "largest exact perimeter")->check(CLI::PositiveNumber);
  solve->add_option("--tol", tol, "residual tolerance");
  solve->add_option("--max-iter", max_iter, "iteration cap");
  solve->add_option("--out", model_out, "output JSON (default stdout)");

  // peel run
  CLI::App* peel = app.add_subcommand("peel", "peeling explorations");
  peel->require_subcommand(1);
  CLI::App* prun = peel->add_subcommand("run", "run one exploration or cell system");
  long perimeter = 64;
  std::string algo = "uniform";
  std::string mode = "finite";
  long cutoff = 0;
  std::uint64_t seed = 1;
  long max_steps = -1;
  long peel_L_max = 0;
  std::string peel_out;
  prun->add_option("--perimeter", perimeter, "root half-perimeter")->check(CLI::PositiveNumber);
  prun->add_option("--algo", algo, "peeling algorithm")->check(CLI::IsMember({"uniform", "layers"}));
  prun->add_option("--mode", mode, "finite or infinite map")->check(CLI::IsMember({"finite", "infinite"}));
  prun->add_option("--cutoff", cutoff, "run a cell system tracking holes >= cutoff (JSON output)");
  prun->add_option("--seed", seed, "random seed");
  prun->add_option("--max-steps", max_steps, "step limit (default: until absorption)");
  prun->add_option("--preset", preset, "weight preset");
  prun->add_option("--L-max", peel_L_max, "model table size (default: max(256, 4 * perimeter))");
  prun->add_option("--out", peel_out, "trace CSV or cell-system JSON (default stdout)");

  // levy sample
  CLI::App* levy_cmd = app.add_subcommand("levy", "continuum processes");
  levy_cmd->require_subcommand(1);
  CLI::App* sample = levy_cmd->add_subcommand("sample", "sample a continuum path");
  std::string process = "xi";
  double alpha = -1.0;
  double start = 1.0;
  double horizon = 1.0;
  double eps_cut = 0.01;
  double delta = 0.01;
  std::string grid_text;
  std::size_t replicates = 1;
  std::string levy_out;
  sample->add_option("--process", process, "process")->check(CLI::IsMember({"xi", "cauchy", "upsilon", "x-alpha", "gf"}));
  sample->add_option("--alpha", alpha, "self-similarity index for x-alpha and gf");
  sample->add_option("--start", start, "starting value");
  sample->add_option("--horizon", horizon, "time horizon");
  sample->add_option("--eps-cut", eps_cut, "small-jump cutoff");
  sample->add_option("--delta", delta, "growth-fragmentation cell cutoff");
  sample->add_option("--grid", grid_text, "comma-separated times (default: 201 points on [0, horizon])");
  sample->add_option("--replicates", replicates, "upsilon: number of weighted paths");
  sample->add_option("--seed", seed, "random seed");
  sample->add_option("--out", levy_out, "output CSV (default stdout)");

  // verify
  CLI::App* verify = app.add_subcommand("verify", "run a verification experiment");
  std::string experiment;
  std::string config_path;
  std::string out_dir = "verify_out";
  int threads = 0;
  std::string cache_dir;
  bool serial = false;
  bool quiet = false;
  verify->add_option("experiment", experiment, "experiment id or 'all'")->required();
  verify->add_option("--config", config_path, "JSON configuration");
  verify->add_option("--out", out_dir, "output directory");
  verify->add_option("--threads", threads, "worker threads (0: OpenMP default)");
  verify->add_option("--cache", cache_dir, "continuum cache directory");
  verify->add_flag("--serial", serial, "run replicates on the serial reference path");
  verify->add_flag("--quiet", quiet, "no progress lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      boltzmann::SolverOptions opt;
      opt.tol = tol;
      opt.max_iter = max_iter;
      const boltzmann::PartitionTable t = boltzmann::solve_partition_function(load_weights(preset, table_path), L_max, opt);
      nlohmann::ordered_json j;
      nlohmann::ordered_json W = nlohmann::ordered_json::array();
      nlohmann::ordered_json w = nlohmann::ordered_json::array();
      nlohmann::ordered_json logW = nlohmann::ordered_json::array();
      for (long l = 0; l <= L_max; ++l) {
        const double v = t.W(l);
        W.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr));
        w.push_back(t.w(l));
        logW.push_back(t.log_W(l));
      }
      j["W"] = W;
      j["c_q"] = t.c();
      j["p_q"] = t.p();
      j["residual"] = t.residual();
      j["L_max"] = t.L_max();
      j["w_scaled"] = w;
      j["log_W"] = logW;
      const boltzmann::Diagnostics& d = t.diagnostics();
      j["diagnostics"] = {{"admissibility_gap", d.admissibility_gap}, {"criticality", d.criticality},
                          {"at_growth_radius", d.at_growth_radius}, {"fitted_exponent", d.fitted_exponent},
                          {"type2", d.type2},                        {"tail_fit_deviation", d.tail_fit_deviation}};
      with_output(model_out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
      return 0;
    }

    if (prun->parsed()) {
      const long lm = peel_L_max > 0 ? peel_L_max : std::max(256L, 4 * perimeter);
      const boltzmann::PeelingModel m(
          boltzmann::solve_partition_function(boltzmann::WeightSequence::preset(preset), lm));
      const peeling::Algorithm a = algo == "layers" ? peeling::Algorithm::layers : peeling::Algorithm::uniform;
      Rng rng(seed);
      if (cutoff > 0) {
        if (mode != "finite") throw std::invalid_argument("cell systems need --mode finite");
        const peeling::CellSystem cs = peeling::run_cell_system(m, perimeter, a, cutoff, rng);
        with_output(peel_out, [&](std::ostream& out) { out << cs.to_json() << '\n'; });
      } else {
        const peeling::Mode md = mode == "infinite" ? peeling::Mode::infinite : peeling::Mode::finite;
        if (md == peeling::Mode::infinite && max_steps < 0) throw std::invalid_argument("infinite mode needs --max-steps");
        const long steps = max_steps < 0 ? std::numeric_limits<long>::max() : max_steps;
        const peeling::ExplorationTrace tr = peeling::run_exploration(m, perimeter, a, md, rng, steps);
        with_output(peel_out, [&](std::ostream& out) { peeling::write_trace_csv(tr, out); });
      }
      return 0;
    }

    if (sample->parsed()) {
      Rng rng(seed);
      if (process == "xi") {
        const levy::JumpPath p = levy::sample_xi(horizon, eps_cut, rng);
        with_output(levy_out, [&](std::ostream& out) { write_knots(p, out); });
      } else if (process == "cauchy") {
        const levy::JumpPath p = levy::sample_cauchy(start, horizon, eps_cut, rng, false);
        with_output(levy_out, [&](std::ostream& out) { write_knots(p, out); });
      } else if (process == "upsilon") {
        const std::vector<double> grid = parse_grid(grid_text, horizon);
        levy::UpsilonOptions opt;
        opt.eps_cut = eps_cut;
        const levy::WeightedEnsemble ens = levy::sample_upsilon_up(grid.back(), replicates, rng, opt);
        with_output(levy_out, [&](std::ostream& out) {
          out << "replicate,time,value,weight\n";
          for (std::size_t i = 0; i < ens.size(); ++i) {
            for (double t : grid) {
              out << i << ',' << fmt(t) << ',' << fmt(ens.first[i].value(t)) << ',' << fmt(ens.weights[i]) << '\n';
            }
          }
        });
      } else if (process == "x-alpha") {
        const std::vector<double> grid = parse_grid(grid_text, horizon);
        levy::LampertiOptions opt;
        opt.eps_cut = eps_cut;
        const levy::LampertiResult x = levy::sample_lamperti(alpha, start, grid, rng, opt);
        with_output(levy_out, [&](std::ostream& out) {
          out << "time,value\n";
          for (std::size_t i = 0; i < grid.size(); ++i) out << fmt(grid[i]) << ',' << fmt(x.values[i]) << '\n';
        });
      } else {
        const std::vector<double> grid = parse_grid(grid_text, horizon);
        levy::GFOptions opt;
        opt.eps_cut = eps_cut;
        const levy::GFResult gf = levy::growth_fragmentation(start, alpha, grid, delta, rng, opt);
        with_output(levy_out, [&](std::ostream& out) {
          out << "ulam_label,birth_time,time,value\n";
          for (const levy::GFCell& c : gf.cells) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
              if (grid[i] < c.birth_time) continue;
              out << '"' << label_string(c.label) << "\"," << fmt(c.birth_time) << ',' << fmt(grid[i]) << ','
                  << fmt(c.values[i]) << '\n';
            }
          }
        });
      }
      return 0;
    }

    if (verify->parsed()) {
      std::vector<verify::ExperimentConfig> configs;
      if (!config_path.empty()) {
        for (verify::ExperimentConfig& c : verify::load_configs(config_path)) {
          if (experiment == "all" || c.experiment == experiment) configs.push_back(std::move(c));
        }
        if (configs.empty()) throw std::invalid_argument("config file has no entry for '" + experiment + "'");
      } else if (experiment == "all") {
        for (const std::string& id : verify::experiment_ids()) configs.push_back(verify::default_config(id));
      } else {
        configs.push_back(verify::default_config(experiment));
      }
      verify::RunContext ctx;
      ctx.exec = serial ? verify::Execution::serial : verify::Execution::parallel;
      ctx.log = quiet ? nullptr : &std::cerr;
      bool all_pass = true;
      for (verify::ExperimentConfig& c : configs) {
        if (threads > 0) c.threads = threads;
        if (!cache_dir.empty()) c.cache_dir = cache_dir;
        const verify::ExperimentResult res = verify::run_experiment(c, ctx);
        verify::write_result(res, out_dir);
        std::cout << res.id << ": " << (res.pass() ? "PASS" : "FAIL");
        for (const verify::Gate& g : res.gates) {
          std::cout << "  " << g.name << '=' << fmt(g.value) << (g.pass ? "" : (g.advisory ? "(advisory)" : "(x)"));
        }
        std::cout << '\n';
        all_pass = all_pass && res.pass();
      }
      return all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
