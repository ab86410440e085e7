#include "peelkit/peeling/decorate.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace peelkit::peeling {

double loop_probability(const boltzmann::PartitionTable& table, long k) {
  if (k < 1) throw std::invalid_argument("loop_probability needs k >= 1");
  const double face = table.nu(k - 1);  // q_k c^{k-1}
  if (face <= 0.0) throw std::domain_error("q_" + std::to_string(k) + " = 0: no face to decorate");
  const double prob = 2.0 * table.w(k) / (table.c() * face);
  if (!(prob <= 1.0 + 1e-12)) {
    throw std::domain_error("loop probability " + std::to_string(prob) + " > 1 at k = " + std::to_string(k));
  }
  return std::min(prob, 1.0);
}

void check_o2_admissible(const boltzmann::PartitionTable& table, long k_max) {
  for (long k = 1; k <= k_max; ++k) {
    if (table.nu(k - 1) > 0.0) loop_probability(table, k);
  }
}

std::size_t DecoratedSystem::total_loops() const {
  std::size_t n = loops.size();
  for (const Loop& l : loops) {
    if (l.interior) n += l.interior->total_loops();
  }
  return n;
}

int DecoratedSystem::max_nesting() const {
  int depth = nesting;
  for (const Loop& l : loops) {
    depth = std::max(depth, l.interior ? l.interior->max_nesting() : nesting + 1);
  }
  return depth;
}

namespace {

DecoratedSystem decorate_level(const PeelingModel& model, CellSystem cs, Rng& rng, const DecorateOptions& options,
                               int nesting) {
  DecoratedSystem out;
  out.nesting = nesting;
  out.gasket = std::move(cs);
  const auto& table = model.table();
  for (std::size_t ci = 0; ci < out.gasket.cells.size(); ++ci) {
    const auto& faces = out.gasket.cells[ci].faces;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      const long k = faces[fi].degree / 2;
      if (rng.uniform() >= loop_probability(table, k)) continue;
      DecoratedSystem::Loop loop;
      loop.cell = ci;
      loop.face = fi;
      loop.half_degree = k;
      out.loops.push_back(std::move(loop));
    }
  }
  for (DecoratedSystem::Loop& loop : out.loops) {
    if (loop.half_degree < options.cutoff || nesting + 1 >= options.max_depth) continue;
    CellSystem inner = run_cell_system(model, loop.half_degree, out.gasket.algo, out.gasket.cutoff, rng);
    loop.interior = std::make_unique<DecoratedSystem>(
        decorate_level(model, std::move(inner), rng, options, nesting + 1));
  }
  return out;
}

}  // namespace

DecoratedSystem decorate_o2(const PeelingModel& model, CellSystem cs, Rng& rng, const DecorateOptions& options) {
  if (options.cutoff < 1) throw std::invalid_argument("decoration cutoff must be >= 1");
  check_o2_admissible(model.table(), options.k_check);
  return decorate_level(model, std::move(cs), rng, options, 0);
}

}  // namespace peelkit::peeling
