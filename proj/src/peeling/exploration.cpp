#include "peelkit/peeling/exploration.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace peelkit::peeling {

ExplorationTrace run_exploration(const PeelingModel& model, long ell, Algorithm algo, Mode mode, Rng& rng,
                                 long max_steps, const ExplorationHooks* hooks) {
  if (ell < 1) throw std::invalid_argument("exploration needs l >= 1");
  ExplorationTrace trace;
  LayeredBoundary state = LayeredBoundary::root(ell);
  trace.P.push_back(state.p);
  trace.H.push_back(0);
  trace.T.push_back(0.0);
  const bool layers = algo == Algorithm::layers;

  for (long n = 0; n < max_steps; ++n) {
    if (hooks && hooks->stop && hooks->stop(state)) break;
    const PeelEvent event = (hooks && hooks->event_source) ? hooks->event_source(state, rng)
                                                           : boltzmann::transition_law(model, mode, state.p).sample(rng);
    const double e = (hooks && hooks->clock_source) ? hooks->clock_source(rng) : rng.exponential();
    const double dt = e / (2.0 * static_cast<double>(state.p));
    const long h_before = state.h;
    const auto [next, outcome] = peel_step(state, event, mode);
    if (next.p > kPerimeterCeiling) {
      throw std::runtime_error("perimeter " + std::to_string(next.p) + " beyond the supported range");
    }
    if (outcome.face_degree > 0) trace.faces.push_back({outcome.face_degree, n, layers ? h_before : 0});
    state = next;
    trace.events.push_back(event);
    trace.P.push_back(state.p);
    trace.H.push_back(layers ? state.h : 0);
    trace.T.push_back(trace.T.back() + dt);
    if (outcome.absorbed) {
      trace.absorbed = true;
      break;
    }
  }
  return trace;
}

void write_trace_csv(const ExplorationTrace& trace, std::ostream& out) {
  out << "step,P,H,T,event_kind,event_param,face_degree\n";
  char t_buf[32];
  for (std::size_t n = 0; n < trace.P.size(); ++n) {
    std::snprintf(t_buf, sizeof t_buf, "%.17g", trace.T[n]);
    out << n << ',' << trace.P[n] << ',' << trace.H[n] << ',' << t_buf << ',';
    if (n < trace.events.size()) {
      const PeelEvent& e = trace.events[n];
      if (e.kind == PeelEvent::Kind::C) {
        out << "C," << e.param << ',' << 2 * e.param;
      } else {
        out << (e.side == Side::left ? "GL," : "GR,") << e.param << ",0";
      }
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace peelkit::peeling
