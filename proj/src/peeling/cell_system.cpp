#include "peelkit/peeling/cell_system.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "json.hpp"

namespace peelkit::peeling {

const Cell* CellSystem::find(const UlamLabel& u) const {
  for (const Cell& c : cells) {
    if (c.label == u) return &c;
  }
  return nullptr;
}

CellSystem run_cell_system(const PeelingModel& model, long ell, Algorithm algo, long cutoff, Rng& rng,
                           const CellSystemOptions& options) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  CellSystem cs;
  cs.cutoff = cutoff;
  cs.algo = algo;
  Cell root;
  root.perimeter = ell;
  cs.cells.push_back(std::move(root));

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();

    const long perimeter = cs.cells[idx].perimeter;
    const long h0 = cs.cells[idx].birth_height;
    ExplorationHooks hooks;
    if (options.max_global_height >= 0) {
      const long limit = options.max_global_height;
      hooks.stop = [h0, limit](const LayeredBoundary& s) { return h0 + s.h > limit; };
    }
    ExplorationTrace trace =
        run_exploration(model, perimeter, algo, Mode::finite, rng, std::numeric_limits<long>::max(), &hooks);

    Cell& cell = cs.cells[idx];
    cell.P = std::move(trace.P);
    cell.H = std::move(trace.H);
    cell.faces = std::move(trace.faces);
    cell.absorbed = trace.absorbed;
    std::vector<SwallowRecord> tracked;
    for (long n = 0; n < static_cast<long>(trace.events.size()); ++n) {
      const PeelEvent& e = trace.events[n];
      if (e.kind != PeelEvent::Kind::G) continue;
      cell.swallows.push_back({n, e.param});
      if (e.param >= cutoff) tracked.push_back({n, e.param});
    }
    std::sort(tracked.begin(), tracked.end(), [](const SwallowRecord& a, const SwallowRecord& b) {
      return a.size != b.size ? a.size > b.size : a.step > b.step;
    });

    const UlamLabel parent_label = cell.label;
    const long parent_birth = cell.birth_time;
    std::vector<long> heights_at_jump;
    for (const SwallowRecord& s : tracked) heights_at_jump.push_back(cell.H[s.step]);
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      if (cs.cells.size() >= options.max_cells) throw std::runtime_error("cell system exceeded max_cells");
      Cell child;
      child.label = parent_label;
      child.label.push_back(static_cast<int>(i + 1));
      child.perimeter = tracked[i].size;
      child.birth_time = parent_birth + tracked[i].step;
      child.birth_height = h0 + heights_at_jump[i];
      child.parent_jump = tracked[i].step;
      cs.cells.push_back(std::move(child));
      cs.cells[idx].children.push_back(cs.cells.size() - 1);
      queue.push_back(cs.cells.size() - 1);
    }
  }
  return cs;
}

std::vector<long> ball_perimeters(const CellSystem& cs, long r) {
  if (r < 0) throw std::invalid_argument("ball radius must be >= 0");
  if (cs.algo != Algorithm::layers) throw std::invalid_argument("ball perimeters need a layers exploration");
  std::vector<long> out;
  for (std::size_t i = 0; i < cs.cells.size(); ++i) {
    const Cell& c = cs.cells[i];
    // A hole swallowed while its parent sits at height r is still part of the
    // parent's boundary when that boundary first reaches r.
    const bool born_before = i == 0 ? c.birth_height <= r : c.birth_height < r;
    if (!born_before || c.birth_height + c.max_height() < r) continue;
    const long target = r - c.birth_height;
    const auto it = std::lower_bound(c.H.begin(), c.H.end(), target);
    if (it == c.H.end()) continue;
    out.push_back(c.P[static_cast<std::size_t>(it - c.H.begin())]);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::string CellSystem::to_json() const {
  nlohmann::ordered_json j;
  j["cutoff"] = cutoff;
  j["algo"] = algo == Algorithm::layers ? "layers" : "uniform";
  nlohmann::ordered_json cells_json = nlohmann::ordered_json::object();
  for (const Cell& c : cells) {
    nlohmann::ordered_json cj;
    cj["perimeter"] = c.perimeter;
    cj["birth_time"] = c.birth_time;
    cj["birth_height"] = c.birth_height;
    cj["parent_jump"] = c.parent_jump;
    cj["absorbed"] = c.absorbed;
    cj["P"] = c.P;
    cj["H"] = c.H;
    nlohmann::ordered_json faces = nlohmann::ordered_json::array();
    for (const FaceRecord& f : c.faces) faces.push_back({f.degree, f.step, f.height});
    cj["faces"] = faces;
    cells_json[label_string(c.label)] = cj;
  }
  j["cells"] = cells_json;
  return j.dump();
}

}  // namespace peelkit::peeling
