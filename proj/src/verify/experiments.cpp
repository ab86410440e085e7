#include "peelkit/verify/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "peelkit/boltzmann/partition.hpp"
#include "peelkit/levy/functionals.hpp"
#include "peelkit/levy/lamperti.hpp"
#include "peelkit/peeling/cell_system.hpp"
#include "peelkit/peeling/exploration.hpp"
#include "peelkit/verify/continuum.hpp"
#include "peelkit/verify/stats.hpp"

namespace peelkit::verify {

using boltzmann::PeelingModel;
using peeling::Algorithm;
using peeling::Mode;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void log_line(const RunContext& ctx, const std::string& id, const std::string& msg) {
  if (ctx.log) *ctx.log << '[' << id << "] " << msg << std::endl;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += num(x) + ",";
  return s;
}

/// Streams for one experiment: discrete replicate r at rung ℓ, bootstrap rows.
Rng discrete_stream(const ExperimentConfig& c, long ell, std::size_t r) {
  return Rng::stream(c.seed, hash_name(c.experiment + "/discrete/" + std::to_string(ell)), r);
}

class Rows {
 public:
  explicit Rows(const ExperimentConfig& c) : c_(c) {}

  SummaryRow compare(long ell, double t, const std::vector<double>& disc, const std::vector<double>& cont,
                     const std::vector<double>& weights = {}) {
    SummaryRow row;
    row.ell = ell;
    row.t = t;
    row.ks = ks_two_sample(disc, cont, weights);
    Rng rng = Rng::stream(c_.seed, hash_name(c_.experiment + "/bootstrap"), counter_++);
    const Interval ci = ks_bootstrap(disc, cont, weights, c_.bootstrap, rng);
    row.ks_lo = ci.lo;
    row.ks_hi = ci.hi;
    row.q = quantile_row(disc);
    row.n = disc.size();
    return row;
  }

  static SummaryRow continuum(double t, const std::vector<double>& cont, const std::vector<double>& weights = {}) {
    SummaryRow row;
    row.ell = 0;
    row.t = t;
    row.q = quantile_row(cont, weights);
    row.n = cont.size();
    if (!weights.empty()) {
      double s = 0.0;
      double s2 = 0.0;
      for (double w : weights) {
        s += w;
        s2 += w * w;
      }
      row.ess = s * s / s2;
    }
    return row;
  }

 private:
  const ExperimentConfig& c_;
  std::uint64_t counter_ = 0;
};

EnsembleRun continuum_run(const ExperimentConfig& c, const RunContext& ctx) {
  return {static_cast<std::size_t>(c.continuum_replicates), c.seed, ctx.exec, c.threads};
}

std::size_t grid_index(const ExperimentConfig& c, double t) {
  return static_cast<std::size_t>(std::find(c.grid.begin(), c.grid.end(), t) - c.grid.begin());
}

/// Kendall tau of the KS column at `t` against ℓ over the ladder.
double ladder_trend(const Observable& obs, double t) {
  std::vector<double> ell;
  std::vector<double> ks;
  for (const SummaryRow& r : obs.rows) {
    if (r.ell > 0 && r.t == t) {
      ell.push_back(static_cast<double>(r.ell));
      ks.push_back(r.ks);
    }
  }
  return kendall_tau(ell, ks);
}

const SummaryRow& find_row(const Observable& obs, long ell, double t) {
  for (const SummaryRow& r : obs.rows) {
    if (r.ell == ell && r.t == t) return r;
  }
  throw std::out_of_range(obs.name + ": no row");
}

nlohmann::ordered_json ks_table(const Observable& obs, double t) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const SummaryRow& r : obs.rows) {
    if (r.ell > 0 && r.t == t) j[std::to_string(r.ell)] = r.ks;
  }
  return j;
}

ColumnSet cached_lamperti(const ExperimentConfig& c, const RunContext& ctx, const std::vector<double>& x_times,
                          double eps) {
  const ContinuumCache cache(c.cache_dir);
  const std::string params = "x=1;times=" + join(x_times) + ";eps=" + num(eps) + ";n=" +
                             std::to_string(c.continuum_replicates);
  return cache.get_or_compute("lamperti", params, c.seed,
                              [&] { return lamperti_ensemble(1.0, x_times, eps, continuum_run(c, ctx)); });
}

}  // namespace

const PeelingModel& shared_model(const ModelRef& ref) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, long>, std::unique_ptr<PeelingModel>> models;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = models[{ref.preset, ref.L_max}];
  if (!slot) {
    slot = std::make_unique<PeelingModel>(
        boltzmann::solve_partition_function(boltzmann::WeightSequence::preset(ref.preset), ref.L_max));
  }
  return *slot;
}

ExperimentResult exp_perimeter_finite(const ExperimentConfig& c, const RunContext& ctx) {
  const PeelingModel& model = shared_model(c.model);
  const double p = model.table().p();
  std::vector<double> x_times;
  for (double t : c.grid) x_times.push_back(kPi * p * t);
  const ColumnSet cont = cached_lamperti(c, ctx, x_times, c.param("eps_cut"));
  std::vector<double> cont_absorb(cont.at("zeta"));
  for (double& z : cont_absorb) z /= kPi * p;

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  Observable perim{"perimeter", {}};
  Observable absorb{"absorption", {}};
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    perim.rows.push_back(Rows::continuum(c.grid[i], cont.at("value_" + std::to_string(i))));
  }
  absorb.rows.push_back(Rows::continuum(NAN, cont_absorb));

  for (long ell : c.ladder) {
    const auto t0 = Clock::now();
    const std::size_t n = static_cast<std::size_t>(c.replicates);
    std::vector<std::vector<double>> disc(c.grid.size(), std::vector<double>(n));
    std::vector<double> absorption(n);
    run_replicates(
        n,
        [&](std::size_t r) {
          Rng rng = discrete_stream(c, ell, r);
          const peeling::ExplorationTrace tr = peeling::run_exploration(model, ell, Algorithm::uniform, Mode::finite, rng);
          for (std::size_t i = 0; i < c.grid.size(); ++i) {
            const std::size_t step = static_cast<std::size_t>(std::floor(c.grid[i] * static_cast<double>(ell)));
            disc[i][r] = step < tr.P.size() ? static_cast<double>(tr.P[step]) / static_cast<double>(ell) : 0.0;
          }
          absorption[r] = tr.absorbed ? static_cast<double>(tr.steps()) / static_cast<double>(ell) : kInf;
        },
        ctx.exec, c.threads);
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      perim.rows.push_back(rows.compare(ell, c.grid[i], disc[i], cont.at("value_" + std::to_string(i))));
    }
    absorb.rows.push_back(rows.compare(ell, NAN, absorption, cont_absorb));
    log_line(ctx, c.experiment, "ell=" + std::to_string(ell) + " done in " + num(seconds_since(t0)) + " s");
  }

  const long top = c.ladder.back();
  const double tau = ladder_trend(perim, c.primary_t);
  res.gates.push_back(make_gate("kendall_tau", tau, "<", c.tol("kendall_tau")));
  res.gates.push_back(make_gate("final_ks", find_row(perim, top, c.primary_t).ks, "<", c.tol("final_ks")));
  double abs_ks = NAN;
  for (const SummaryRow& r : absorb.rows) {
    if (r.ell == top) abs_ks = r.ks;
  }
  res.gates.push_back(make_gate("absorption_ks", abs_ks, "<", c.tol("absorption_ks")));
  res.details["p_q"] = p;
  res.details["ks_by_ell"] = ks_table(perim, c.primary_t);
  res.details["continuum_mean_zeta"] = mean(cont.at("zeta"));
  res.observables = {perim, absorb};
  return res;
}

ExperimentResult exp_perimeter_infinite(const ExperimentConfig& c, const RunContext& ctx) {
  const PeelingModel& model = shared_model(c.model);
  const double p = model.table().p();
  std::vector<double> u_times;
  for (double t : c.grid) u_times.push_back(p * t);
  const double eps = c.param("eps_cut");
  const ContinuumCache cache(c.cache_dir);
  const std::string params = "times=" + join(u_times) + ";eps=" + num(eps) + ";n=" + std::to_string(c.continuum_replicates);
  const ColumnSet cont = cache.get_or_compute("upsilon", params, c.seed,
                                              [&] { return upsilon_ensemble(u_times, eps, continuum_run(c, ctx)); });
  const std::vector<double>& w = cont.at("weight");

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  Observable perim{"perimeter", {}};
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    perim.rows.push_back(Rows::continuum(c.grid[i], cont.at("value_" + std::to_string(i)), w));
  }
  const double ess = perim.rows.front().ess;
  if (ess < c.tol("ess_fraction") * static_cast<double>(c.continuum_replicates)) {
    throw std::runtime_error("perimeter_infinite: continuum ESS " + num(ess) + " below the floor");
  }

  long nonpositive = 0;
  for (long ell : c.ladder) {
    const auto t0 = Clock::now();
    const std::size_t n = static_cast<std::size_t>(c.replicates);
    const long steps = static_cast<long>(std::floor(c.grid.back() * static_cast<double>(ell)));
    std::vector<std::vector<double>> disc(c.grid.size(), std::vector<double>(n));
    std::vector<long> bad(n, 0);
    run_replicates(
        n,
        [&](std::size_t r) {
          Rng rng = discrete_stream(c, ell, r);
          const peeling::ExplorationTrace tr =
              peeling::run_exploration(model, ell, Algorithm::uniform, Mode::infinite, rng, steps);
          bad[r] = std::count_if(tr.P.begin(), tr.P.end(), [](long v) { return v <= 0; });
          for (std::size_t i = 0; i < c.grid.size(); ++i) {
            const std::size_t step = static_cast<std::size_t>(std::floor(c.grid[i] * static_cast<double>(ell)));
            disc[i][r] = static_cast<double>(tr.P.at(step)) / static_cast<double>(ell);
          }
        },
        ctx.exec, c.threads);
    for (long b : bad) nonpositive += b;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      perim.rows.push_back(rows.compare(ell, c.grid[i], disc[i], cont.at("value_" + std::to_string(i)), w));
    }
    log_line(ctx, c.experiment, "ell=" + std::to_string(ell) + " done in " + num(seconds_since(t0)) + " s");
  }
  for (SummaryRow& r : perim.rows) {
    if (r.ell > 0) r.ess = ess;
  }

  const long top = c.ladder.back();
  // A trend is only meaningful above the two-sample KS critical value; below
  // it every rung already agrees with the limit.
  double max_ks = 0.0;
  for (long ell : c.ladder) max_ks = std::max(max_ks, find_row(perim, ell, c.primary_t).ks);
  const double m = static_cast<double>(c.replicates);
  const double noise = 1.358 * std::sqrt((m + ess) / (m * ess));
  Gate trend = make_gate("kendall_tau", ladder_trend(perim, c.primary_t), "<", c.tol("kendall_tau"));
  if (!trend.pass && max_ks < noise) {
    trend.pass = true;
    trend.note = "every rung below the 5% KS critical value " + num(noise);
  }
  res.gates.push_back(trend);
  res.gates.push_back(make_gate("final_ks", find_row(perim, top, c.primary_t).ks, "<", c.tol("final_ks")));
  res.details["ks_noise_floor"] = noise;
  res.gates.push_back(make_gate("ess_fraction", ess / static_cast<double>(c.continuum_replicates), ">=",
                                c.tol("ess_fraction")));
  res.gates.push_back(make_gate("nonpositive_perimeters", static_cast<double>(nonpositive), "<=", 0.0));
  res.details["p_q"] = p;
  res.details["ks_by_ell"] = ks_table(perim, c.primary_t);
  res.details["continuum_ess"] = ess;
  res.observables = {perim};
  return res;
}

ExperimentResult exp_fpp(const ExperimentConfig& c, const RunContext& ctx) {
  const PeelingModel& model = shared_model(c.model);
  const double p = model.table().p();
  std::vector<double> x_times;
  for (double t : c.grid) x_times.push_back(kPi * p * t);
  const ColumnSet cont = cached_lamperti(c, ctx, x_times, c.param("eps_cut"));
  // ∫_0^t ds / (2 X(π p s)) = τ(π p t) / (2π p)
  std::vector<std::vector<double>> limit(c.grid.size());
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    limit[i] = cont.at("tau_" + std::to_string(i));
    for (double& v : limit[i]) v /= 2.0 * kPi * p;
  }

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  Observable fpp{"fpp", {}};
  for (std::size_t i = 0; i < c.grid.size(); ++i) fpp.rows.push_back(Rows::continuum(c.grid[i], limit[i]));
  for (long ell : c.ladder) {
    const auto t0 = Clock::now();
    const std::size_t n = static_cast<std::size_t>(c.replicates);
    const long steps = static_cast<long>(std::floor(c.grid.back() * static_cast<double>(ell)));
    std::vector<std::vector<double>> disc(c.grid.size(), std::vector<double>(n));
    run_replicates(
        n,
        [&](std::size_t r) {
          Rng rng = discrete_stream(c, ell, r);
          const peeling::ExplorationTrace tr =
              peeling::run_exploration(model, ell, Algorithm::uniform, Mode::finite, rng, steps);
          for (std::size_t i = 0; i < c.grid.size(); ++i) {
            const std::size_t step = static_cast<std::size_t>(std::floor(c.grid[i] * static_cast<double>(ell)));
            disc[i][r] = tr.T[std::min(step, tr.T.size() - 1)];
          }
        },
        ctx.exec, c.threads);
    for (std::size_t i = 0; i < c.grid.size(); ++i) fpp.rows.push_back(rows.compare(ell, c.grid[i], disc[i], limit[i]));
    log_line(ctx, c.experiment, "ell=" + std::to_string(ell) + " done in " + num(seconds_since(t0)) + " s");
  }
  res.gates.push_back(make_gate("final_ks", find_row(fpp, c.ladder.back(), c.primary_t).ks, "<", c.tol("final_ks")));
  res.details["p_q"] = p;
  res.details["ks_by_ell"] = ks_table(fpp, c.primary_t);
  res.details["kendall_tau"] = ladder_trend(fpp, c.primary_t);
  res.observables = {fpp};
  return res;
}

ExperimentResult exp_height(const ExperimentConfig& c, const RunContext& ctx) {
  const PeelingModel& model = shared_model(c.model);
  const double p = model.table().p();
  std::vector<double> x_times;
  for (double t : c.grid) x_times.push_back(kPi * p * t);
  const ColumnSet cont = cached_lamperti(c, ctx, x_times, c.param("eps_cut"));
  // ∫_0^t p ds / (2 X(π p s)) = τ(π p t) / (2π)
  std::vector<std::vector<double>> limit(c.grid.size());
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    limit[i] = cont.at("tau_" + std::to_string(i));
    for (double& v : limit[i]) v /= 2.0 * kPi;
  }

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  Observable height{"height", {}};
  Observable raw{"height_raw", {}};
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    height.rows.push_back(Rows::continuum(c.grid[i], limit[i]));
    raw.rows.push_back(Rows::continuum(c.grid[i], limit[i]));
  }
  const std::size_t ip = grid_index(c, c.primary_t);
  const double cont_median = quantile(limit[ip], 0.5);
  std::vector<double> ells;
  std::vector<double> gaps;
  long bad_increments = 0;
  nlohmann::ordered_json medians = nlohmann::ordered_json::object();
  nlohmann::ordered_json raw_medians = nlohmann::ordered_json::object();
  for (long ell : c.ladder) {
    const auto t0 = Clock::now();
    const std::size_t n = static_cast<std::size_t>(c.replicates);
    const long steps = static_cast<long>(std::floor(c.grid.back() * static_cast<double>(ell)));
    const double log_ell = std::log(static_cast<double>(ell));
    std::vector<std::vector<double>> disc(c.grid.size(), std::vector<double>(n));
    std::vector<std::vector<double>> disc_raw(c.grid.size(), std::vector<double>(n));
    std::vector<long> bad(n, 0);
    run_replicates(
        n,
        [&](std::size_t r) {
          Rng rng = discrete_stream(c, ell, r);
          // Completed layers plus the consumed share of the current one.
          std::vector<double> layers;
          peeling::ExplorationHooks hooks;
          hooks.stop = [&layers](const peeling::LayeredBoundary& s) {
            layers.push_back(static_cast<double>(s.h) + 1.0 - static_cast<double>(s.m) / (2.0 * static_cast<double>(s.p)));
            return false;
          };
          const peeling::ExplorationTrace tr =
              peeling::run_exploration(model, ell, Algorithm::layers, Mode::finite, rng, steps + 1, &hooks);
          for (std::size_t k = 1; k < tr.H.size(); ++k) {
            const long dh = tr.H[k] - tr.H[k - 1];
            if (dh != 0 && dh != 1) ++bad[r];
          }
          for (std::size_t i = 0; i < c.grid.size(); ++i) {
            const std::size_t step = static_cast<std::size_t>(std::floor(c.grid[i] * static_cast<double>(ell)));
            const std::size_t last = tr.H.size() - 1;
            disc_raw[i][r] = static_cast<double>(tr.H[std::min(step, last)]) / log_ell;
            const double h = step < layers.size() ? layers[step] : static_cast<double>(tr.H[last]);
            disc[i][r] = h / log_ell;
          }
        },
        ctx.exec, c.threads);
    for (long b : bad) bad_increments += b;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      height.rows.push_back(rows.compare(ell, c.grid[i], disc[i], limit[i]));
      raw.rows.push_back(rows.compare(ell, c.grid[i], disc_raw[i], limit[i]));
    }
    const double med = quantile(disc[ip], 0.5);
    ells.push_back(static_cast<double>(ell));
    gaps.push_back(std::abs(med - cont_median) / cont_median);
    medians[std::to_string(ell)] = med;
    raw_medians[std::to_string(ell)] = quantile(disc_raw[ip], 0.5);
    log_line(ctx, c.experiment, "ell=" + std::to_string(ell) + " done in " + num(seconds_since(t0)) + " s");
  }
  res.gates.push_back(make_gate("kendall_tau", kendall_tau(ells, gaps), "<", c.tol("kendall_tau"),
                                "trend of the relative median gap across the ladder"));
  Gate gap = make_gate("median_gap", gaps.back(), "<", c.tol("median_gap"));
  if (!gap.pass && c.param("allow_trend_only", 0.0) != 0.0) {
    gap.advisory = true;
    gap.note = "trend-only downgrade: logarithmic convergence leaves the final median gap above the tolerance";
  }
  res.gates.push_back(gap);
  res.gates.push_back(make_gate("height_increments", static_cast<double>(bad_increments), "<=", 0.0));
  res.details["p_q"] = p;
  res.details["continuum_median"] = cont_median;
  res.details["discrete_medians"] = medians;
  res.details["completed_layer_medians"] = raw_medians;
  res.details["relative_gaps"] = gaps;
  res.details["trend_only"] = gap.advisory;
  res.observables = {height, raw};
  return res;
}

ExperimentResult exp_joint_faces(const ExperimentConfig& c, const RunContext& ctx) {
  const PeelingModel& model = shared_model(c.model);
  const double p = model.table().p();
  const int ranks = static_cast<int>(c.param("ranks"));
  const double divisor = c.param("cutoff_divisor");
  const double delta = 1.0 / divisor;
  const double eps = c.param("eps_cut");
  const ContinuumCache cache(c.cache_dir);
  const std::string params = "delta=" + num(delta) + ";ranks=" + std::to_string(ranks) + ";eps=" + num(eps) +
                             ";n=" + std::to_string(c.continuum_replicates);
  const ColumnSet cont = cache.get_or_compute(
      "gf_jumps", params, c.seed, [&] { return gf_jump_ensemble(delta, ranks, eps, continuum_run(c, ctx)); });

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  Observable degree{"degree", {}};
  Observable time{"time", {}};
  Observable dist{"distance", {}};
  for (int k = 1; k <= ranks; ++k) {
    degree.rows.push_back(Rows::continuum(k, cont.at("size_" + std::to_string(k))));
    time.rows.push_back(Rows::continuum(k, cont.at("ytime_" + std::to_string(k))));
    dist.rows.push_back(Rows::continuum(k, cont.at("distance_" + std::to_string(k))));
  }
  for (long ell : c.ladder) {
    const auto t0 = Clock::now();
    const std::size_t n = static_cast<std::size_t>(c.replicates);
    const double L = static_cast<double>(ell);
    const long cutoff = std::max(1L, static_cast<long>(std::llround(L / divisor)));
    std::vector<std::vector<double>> deg(ranks, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> tim(ranks, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> dis(ranks, std::vector<double>(n, 0.0));
    run_replicates(
        n,
        [&](std::size_t r) {
          Rng rng = discrete_stream(c, ell, r);
          const peeling::CellSystem cs = peeling::run_cell_system(model, ell, Algorithm::layers, cutoff, rng);
          struct Face {
            long degree, step, height;
          };
          std::vector<Face> faces;
          for (const peeling::Cell& cell : cs.cells) {
            for (const peeling::FaceRecord& f : cell.faces) {
              faces.push_back({f.degree, cell.birth_time + f.step, cell.birth_height + f.height});
            }
          }
          const int keep = std::min(ranks, static_cast<int>(faces.size()));
          std::partial_sort(faces.begin(), faces.begin() + keep, faces.end(), [](const Face& a, const Face& b) {
            return a.degree != b.degree ? a.degree > b.degree : a.step < b.step;
          });
          for (int k = 0; k < keep; ++k) {
            const double size = static_cast<double>(faces[k].degree) / (2.0 * L);
            if (size < delta) break;
            deg[k][r] = size;
            tim[k][r] = p * static_cast<double>(faces[k].step) / L;
            dis[k][r] = 2.0 * static_cast<double>(faces[k].height) / std::log(L);
          }
        },
        ctx.exec, c.threads);
    for (int k = 1; k <= ranks; ++k) {
      degree.rows.push_back(rows.compare(ell, k, deg[k - 1], cont.at("size_" + std::to_string(k))));
      time.rows.push_back(rows.compare(ell, k, tim[k - 1], cont.at("ytime_" + std::to_string(k))));
      dist.rows.push_back(rows.compare(ell, k, dis[k - 1], cont.at("distance_" + std::to_string(k))));
    }
    log_line(ctx, c.experiment, "ell=" + std::to_string(ell) + " done in " + num(seconds_since(t0)) + " s");
  }
  const long top = c.ladder.back();
  res.gates.push_back(make_gate("degree_ks", find_row(degree, top, 1).ks, "<", c.tol("degree_ks")));
  res.gates.push_back(make_gate("time_ks", find_row(time, top, 1).ks, "<", c.tol("time_ks")));
  res.details["p_q"] = p;
  res.details["degree_ks_by_ell"] = ks_table(degree, 1);
  res.details["time_ks_by_ell"] = ks_table(time, 1);
  res.details["distance_ks_by_ell"] = ks_table(dist, 1);
  res.observables = {degree, time, dist};
  return res;
}

ExperimentResult exp_ball_perimeters(const ExperimentConfig& c, const RunContext& ctx) {
  const PeelingModel& model = shared_model(c.model);
  const int ranks = static_cast<int>(c.param("ranks"));
  const double divisor = c.param("cutoff_divisor");
  const double delta = 1.0 / divisor;
  const double eps = c.param("eps_cut");

  // Radii r = round(s log ℓ), compared with the α = 0 system at time 2π r / log ℓ.
  std::map<std::pair<long, std::size_t>, long> radius;
  std::vector<double> times;
  std::map<std::pair<long, std::size_t>, std::size_t> time_index;
  for (long ell : c.ladder) {
    const double log_ell = std::log(static_cast<double>(ell));
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      const long r = std::lround(c.grid[i] * log_ell);
      radius[{ell, i}] = r;
      const double t = 2.0 * kPi * static_cast<double>(r) / log_ell;
      auto it = std::find(times.begin(), times.end(), t);
      if (it == times.end()) {
        times.push_back(t);
        it = times.end() - 1;
      }
      time_index[{ell, i}] = static_cast<std::size_t>(it - times.begin());
    }
  }
  std::vector<std::size_t> perm(times.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> sorted_times;
  std::vector<std::size_t> slot(times.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    sorted_times.push_back(times[perm[k]]);
    slot[perm[k]] = k;
  }
  const ContinuumCache cache(c.cache_dir);
  const std::string params = "times=" + join(sorted_times) + ";delta=" + num(delta) + ";ranks=" +
                             std::to_string(ranks) + ";eps=" + num(eps) + ";n=" +
                             std::to_string(c.continuum_replicates);
  const ColumnSet cont = cache.get_or_compute("gf_ranks", params, c.seed, [&] {
    return gf_rank_ensemble(sorted_times, delta, ranks, eps, continuum_run(c, ctx));
  });
  const auto cont_col = [&](int k, long ell, std::size_t i) -> const std::vector<double>& {
    return cont.at("rank_" + std::to_string(k) + "_" + std::to_string(slot[time_index.at({ell, i})]));
  };

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  std::vector<Observable> obs;
  for (int k = 1; k <= ranks; ++k) obs.push_back({"rank" + std::to_string(k), {}});
  for (int k = 1; k <= ranks; ++k) {
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      obs[k - 1].rows.push_back(Rows::continuum(c.grid[i], cont_col(k, c.ladder.back(), i)));
    }
  }
  const auto simulate = [&](long ell, long cutoff) {
    const std::size_t n = static_cast<std::size_t>(c.replicates);
    std::vector<std::vector<std::vector<double>>> disc(
        ranks, std::vector<std::vector<double>>(c.grid.size(), std::vector<double>(n, 0.0)));
    long r_max = 0;
    for (std::size_t i = 0; i < c.grid.size(); ++i) r_max = std::max(r_max, radius.at({ell, i}));
    run_replicates(
        n,
        [&](std::size_t r) {
          Rng rng = discrete_stream(c, ell, r);
          peeling::CellSystemOptions opt;
          opt.max_global_height = r_max;
          const peeling::CellSystem cs = peeling::run_cell_system(model, ell, Algorithm::layers, cutoff, rng, opt);
          for (std::size_t i = 0; i < c.grid.size(); ++i) {
            const std::vector<long> ball = peeling::ball_perimeters(cs, radius.at({ell, i}));
            for (int k = 0; k < ranks && k < static_cast<int>(ball.size()); ++k) {
              disc[k][i][r] = static_cast<double>(ball[k]) / static_cast<double>(ell);
            }
          }
        },
        ctx.exec, c.threads);
    return disc;
  };
  const std::size_t ip = grid_index(c, c.primary_t);
  std::vector<double> rank1_top;
  for (long ell : c.ladder) {
    const auto t0 = Clock::now();
    const long cutoff = std::max(1L, static_cast<long>(std::llround(static_cast<double>(ell) / divisor)));
    const auto disc = simulate(ell, cutoff);
    for (int k = 1; k <= ranks; ++k) {
      for (std::size_t i = 0; i < c.grid.size(); ++i) {
        obs[k - 1].rows.push_back(rows.compare(ell, c.grid[i], disc[k - 1][i], cont_col(k, ell, i)));
      }
    }
    if (ell == c.ladder.back()) rank1_top = disc[0][ip];
    log_line(ctx, c.experiment, "ell=" + std::to_string(ell) + " done in " + num(seconds_since(t0)) + " s");
  }
  // Truncation robustness: halve the cutoff at the top of the ladder.
  const long top = c.ladder.back();
  const long half_cutoff =
      std::max(1L, static_cast<long>(std::llround(static_cast<double>(top) / (2.0 * divisor))));
  const auto refined = simulate(top, half_cutoff);
  const double cutoff_ks = ks_two_sample(rank1_top, refined[0][ip]);

  res.gates.push_back(make_gate("rank1_ks", find_row(obs[0], top, c.primary_t).ks, "<", c.tol("rank1_ks")));
  res.details["rank1_ks_by_ell"] = ks_table(obs[0], c.primary_t);
  res.details["cutoff_halving_rank1_ks"] = cutoff_ks;
  nlohmann::ordered_json radii = nlohmann::ordered_json::object();
  for (long ell : c.ladder) radii[std::to_string(ell)] = radius.at({ell, ip});
  res.details["radius_at_primary"] = radii;
  res.observables = std::move(obs);
  return res;
}

ExperimentResult exp_lamperti_identity(const ExperimentConfig& c, const RunContext& ctx) {
  const double t = c.primary_t;
  const double eps = c.param("eps");
  const std::vector<double> windows{8.0 * eps, 4.0 * eps, 2.0 * eps, eps};
  const std::size_t n = static_cast<std::size_t>(c.replicates);
  std::vector<std::vector<double>> qnd(windows.size(), std::vector<double>(n));
  std::vector<double> alive(n);
  std::vector<double> lived(n);
  std::vector<long> limited(n, 0);
  const auto t0 = Clock::now();
  run_replicates(
      n,
      [&](std::size_t r) {
        Rng rng = Rng::stream(c.seed, hash_name(c.experiment), r);
        levy::LampertiOptions opt;
        opt.eps_cut = eps * c.param("eps_cut_ratio");
        opt.record_jumps = true;
        opt.jump_threshold = eps;
        opt.record_until = kPi * t;
        const levy::LampertiResult x = levy::sample_lamperti(-1.0, 1.0, {kPi * t}, rng, opt);
        limited[r] = x.hit_limit ? 1 : 0;
        for (std::size_t k = 0; k < windows.size(); ++k) qnd[k][r] = levy::qnd_estimator(x.jumps, t, windows[k], kPi);
        alive[r] = x.values[0] > 0.0 ? 1.0 : 0.0;
        lived[r] = alive[r] > 0.0 ? t : std::min(t, x.zeta / kPi);
      },
      ctx.exec, c.threads);
  log_line(ctx, c.experiment, "done in " + num(seconds_since(t0)) + " s");

  ExperimentResult res;
  res.id = c.experiment;
  nlohmann::ordered_json means = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < windows.size(); ++k) {
    Observable o{k + 1 == windows.size() ? "qnd" : "qnd_eps" + num(windows[k]), {}};
    o.rows.push_back(Rows::continuum(t, qnd[k]));
    res.observables.insert(res.observables.begin(), o);
    means[num(windows[k])] = {{"mean", mean(qnd[k])}, {"se", standard_error(qnd[k])}};
  }
  std::vector<double> survivors;
  for (std::size_t r = 0; r < n; ++r) {
    if (alive[r] > 0.0) survivors.push_back(qnd.back()[r]);
  }
  const double m = mean(qnd.back());
  res.gates.push_back(make_range_gate("qnd_mean", m, c.tol("mean_lo"), c.tol("mean_hi"),
                                      "mean of eps * #{jumps of Y in [eps, 2 eps] before t}, dead paths included"));
  long hit = 0;
  for (long h : limited) hit += h;
  res.details["means_by_eps"] = means;
  res.details["survival_fraction"] = mean(alive);
  res.details["survivor_mean"] = survivors.empty() ? NAN : mean(survivors);
  res.details["survivor_se"] = survivors.size() < 2 ? NAN : standard_error(survivors);
  res.details["mean_lifetime_capped_at_t"] = mean(lived);
  res.details["paths_hitting_limit"] = hit;
  return res;
}

ExperimentResult exp_self_similarity(const ExperimentConfig& c, const RunContext& ctx) {
  const double x = c.param("start");
  const double eps = c.param("eps_cut");
  const std::size_t n = static_cast<std::size_t>(c.replicates);
  std::vector<double> scaled_grid;
  for (double t : c.grid) scaled_grid.push_back(t / x);
  std::vector<std::vector<double>> a(c.grid.size(), std::vector<double>(n));
  std::vector<std::vector<double>> b(c.grid.size(), std::vector<double>(n));
  const auto t0 = Clock::now();
  run_replicates(
      n,
      [&](std::size_t r) {
        Rng ra = Rng::stream(c.seed, hash_name(c.experiment + "/unit"), r);
        Rng rb = Rng::stream(c.seed, hash_name(c.experiment + "/start"), r);
        levy::LampertiOptions opt;
        opt.eps_cut = eps;
        const levy::LampertiResult xa = levy::sample_lamperti(-1.0, 1.0, scaled_grid, ra, opt);
        const levy::LampertiResult xb = levy::sample_lamperti(-1.0, x, c.grid, rb, opt);
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
          a[i][r] = x * xa.values[i];
          b[i][r] = xb.values[i];
        }
      },
      ctx.exec, c.threads);
  log_line(ctx, c.experiment, "done in " + num(seconds_since(t0)) + " s");

  ExperimentResult res;
  res.id = c.experiment;
  Rows rows(c);
  Observable o{"scaled", {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    o.rows.push_back(Rows::continuum(c.grid[i], b[i]));
    SummaryRow row = rows.compare(1, c.grid[i], a[i], b[i]);
    worst = std::max(worst, row.ks);
    o.rows.push_back(row);
  }
  res.gates.push_back(make_gate("max_ks", worst, "<", c.tol("max_ks")));
  res.details["start"] = x;
  res.observables = {o};
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunContext& ctx) {
  config.validate();
  const auto t0 = Clock::now();
  ExperimentResult res;
  const std::string& id = config.experiment;
  if (id == "perimeter_finite") {
    res = exp_perimeter_finite(config, ctx);
  } else if (id == "perimeter_infinite") {
    res = exp_perimeter_infinite(config, ctx);
  } else if (id == "fpp") {
    res = exp_fpp(config, ctx);
  } else if (id == "height") {
    res = exp_height(config, ctx);
  } else if (id == "joint_faces") {
    res = exp_joint_faces(config, ctx);
  } else if (id == "ball_perimeters") {
    res = exp_ball_perimeters(config, ctx);
  } else if (id == "lamperti_identity") {
    res = exp_lamperti_identity(config, ctx);
  } else if (id == "self_similarity") {
    res = exp_self_similarity(config, ctx);
  } else {
    throw std::invalid_argument("unknown experiment '" + id + "'");
  }
  res.wall_time = seconds_since(t0);
  res.details["seed"] = config.seed;
  return res;
}

}  // namespace peelkit::verify
