#include "peelkit/levy/growth_fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace peelkit::levy {

GFResult growth_fragmentation(double x, double alpha, const std::vector<double>& t_grid, double delta, Rng& rng,
                              const GFOptions& options) {
  if (!(delta > 0.0)) throw std::invalid_argument("growth-fragmentation needs delta > 0");
  if (alpha != 0.0 && alpha != -1.0) throw std::invalid_argument("growth-fragmentation supports alpha in {0, -1}");
  if (!(x > 0.0)) throw std::invalid_argument("growth-fragmentation start must be > 0");
  if (options.full_lifetime && alpha != -1.0) throw std::invalid_argument("full lifetime needs alpha = -1");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw std::invalid_argument("time grid must be sorted");
  const double horizon = options.full_lifetime ? std::numeric_limits<double>::infinity()
                                               : (t_grid.empty() ? 0.0 : t_grid.back());

  const double resolution = options.resolution > 0.0 ? options.resolution : delta / 4.0;

  GFResult res;
  res.alpha = alpha;
  res.delta = delta;
  res.grid = t_grid;
  std::vector<Rng> streams;
  res.cells.push_back(GFCell{});
  res.cells[0].start = x;
  streams.push_back(rng.child(0));

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    const double birth = res.cells[idx].birth_time;

    std::vector<double> local;
    std::size_t first = 0;
    while (first < t_grid.size() && t_grid[first] < birth) ++first;
    for (std::size_t i = first; i < t_grid.size(); ++i) local.push_back(t_grid[i] - birth);

    LampertiOptions lo;
    lo.eps_cut = std::min(options.eps_cut, resolution / res.cells[idx].start);
    lo.gaussian = options.gaussian;
    lo.need_zeta = options.full_lifetime;
    lo.record_jumps = true;
    lo.jump_threshold = delta;
    lo.record_until = horizon - birth;
    Rng cell_rng = streams[idx];
    LampertiResult path = sample_lamperti(alpha, res.cells[idx].start, local, cell_rng, lo);

    GFCell& cell = res.cells[idx];
    cell.values.assign(t_grid.size(), 0.0);
    for (std::size_t i = 0; i < local.size(); ++i) {
      const double v = path.values[i];
      cell.values[first + i] = std::isnan(v) ? 0.0 : v;
    }
    cell.zeta = path.zeta;
    cell.zeta_finite = path.zeta_finite;
    cell.jumps = std::move(path.jumps);

    std::vector<const XJump*> spawn;
    for (const XJump& j : cell.jumps) {
      if (j.size <= -delta) spawn.push_back(&j);
    }
    std::sort(spawn.begin(), spawn.end(), [](const XJump* a, const XJump* b) {
      return a->size != b->size ? a->size < b->size : a->t > b->t;
    });
    const UlamLabel label = cell.label;
    const double distance = cell.birth_distance;
    const Rng parent_stream = streams[idx];
    std::vector<GFCell> born;
    for (std::size_t k = 0; k < spawn.size(); ++k) {
      GFCell child;
      child.label = label;
      child.label.push_back(static_cast<int>(k + 1));
      child.start = -spawn[k]->size;
      child.birth_time = birth + spawn[k]->t;
      child.birth_distance = distance + spawn[k]->xi_time;
      child.parent = static_cast<long>(idx);
      streams.push_back(parent_stream.child(static_cast<std::uint64_t>(spawn[k]->index) + 1));
      born.push_back(std::move(child));
    }
    for (GFCell& child : born) {
      if (res.cells.size() >= options.max_cells) throw std::runtime_error("growth-fragmentation exceeded max_cells");
      res.cells.push_back(std::move(child));
      res.cells[idx].children.push_back(res.cells.size() - 1);
      queue.push_back(res.cells.size() - 1);
    }
  }

  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    GFState st;
    st.t = t_grid[i];
    std::vector<std::pair<double, std::size_t>> alive;
    for (std::size_t c = 0; c < res.cells.size(); ++c) {
      const double v = res.cells[c].values[i];
      if (v > 0.0 && v >= options.report_threshold) alive.emplace_back(v, c);
    }
    std::sort(alive.begin(), alive.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [v, c] : alive) {
      st.sizes.push_back(v);
      st.cells.push_back(c);
    }
    res.states.push_back(std::move(st));
  }
  return res;
}

}  // namespace peelkit::levy
