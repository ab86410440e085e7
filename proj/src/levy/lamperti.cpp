#include "peelkit/levy/lamperti.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "peelkit/levy/measure.hpp"

namespace peelkit::levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Accumulates I(s) = ∫_0^s e^{-αξ} along a path fed as linear segments and
/// jumps, and reads off X on an increasing grid of X-times.
class Integrator {
 public:
  Integrator(double alpha, double x, const std::vector<double>& grid, LampertiResult& out)
      : alpha_(alpha), x_(x), scale_(std::pow(x, alpha)), out_(out) {
    if (!(x > 0.0)) throw std::invalid_argument("Lamperti start must be > 0");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("time grid must be sorted");
    if (!grid.empty() && grid.front() < 0.0) throw std::invalid_argument("time grid must be >= 0");
    out_.alpha = alpha;
    out_.x = x;
    out_.grid = grid;
    out_.values.assign(grid.size(), kNaN);
    out_.tau.assign(grid.size(), kNaN);
  }

  double level() const { return x_ * std::exp(v_); }
  double xi() const { return v_; }
  double s() const { return s_; }
  double integral() const { return I_; }
  double x_time() const { return I_ / scale_; }
  bool grid_done() const { return gi_ >= out_.grid.size(); }

  void segment(double dt, double b) {
    if (dt <= 0.0) return;
    const double ab = -alpha_ * b;
    const double base = std::exp(-alpha_ * v_);
    const double J = base * dt * relative_expm1(ab * dt);
    while (gi_ < out_.grid.size() && I_ + J >= out_.grid[gi_] * scale_) {
      const double need = out_.grid[gi_] * scale_ - I_;
      double r = ab == 0.0 ? need / base : std::log1p(std::max(need * ab / base, -1.0 + 1e-16)) / ab;
      r = std::clamp(r, 0.0, dt);
      out_.values[gi_] = x_ * std::exp(v_ + b * r);
      out_.tau[gi_] = s_ + r;
      ++gi_;
    }
    I_ += J;
    s_ += dt;
    v_ += b * dt;
  }

  void jump(double y, const LampertiOptions* rec) {
    const double before = level();
    v_ += y;
    ++out_.xi_jumps;
    if (!rec || !rec->record_jumps) return;
    const double t = x_time();
    const double dx = before * std::expm1(y);
    if (t <= rec->record_until && std::abs(dx) >= rec->jump_threshold) out_.jumps.push_back({t, s_, before, dx, out_.xi_jumps - 1});
  }

  /// Lifetime reached: every grid time beyond I_total is in the cemetery.
  void close_with_zeta(double I_total, double err) {
    out_.zeta = I_total / scale_;
    out_.zeta_finite = true;
    out_.zeta_error = err / scale_;
    for (; gi_ < out_.grid.size(); ++gi_) {
      out_.values[gi_] = 0.0;
      out_.tau[gi_] = kInf;
    }
  }

  void finish() { out_.xi_time = s_; }

 private:
  static double relative_expm1(double z) { return std::abs(z) < 1e-12 ? 1.0 + 0.5 * z : std::expm1(z) / z; }

  double alpha_;
  double x_;
  double scale_;
  LampertiResult& out_;
  std::size_t gi_ = 0;
  double s_ = 0.0;
  double v_ = 0.0;
  double I_ = 0.0;
};

constexpr double kZetaEnvelope = std::numbers::pi / 2.0;  // E ∫_0^∞ e^{ξ} = -1/Ψ(1)

}  // namespace

LampertiResult lamperti(const JumpPath& xi, double alpha, double x, const std::vector<double>& t_grid) {
  LampertiResult out;
  Integrator in(alpha, x, t_grid, out);
  const double b = xi.slope();
  double prev = 0.0;
  if (xi.start != 0.0) in.jump(xi.start, nullptr);
  for (const Jump& j : xi.jumps) {
    in.segment(j.time - prev, b);
    in.jump(j.size, nullptr);
    prev = j.time;
  }
  in.segment(xi.horizon - prev, b);
  // Continuation by the drift alone.
  if (alpha < 0.0 && b < 0.0) {
    const double rest = std::exp(-alpha * in.xi()) / (alpha * b);
    const double total = in.integral() + rest;
    out.extrapolated = true;
    if (!in.grid_done()) in.segment(800.0 / (alpha * b), b);
    in.close_with_zeta(total, 0.0);
  } else if (!in.grid_done()) {
    in.segment(1e6, b);
    out.extrapolated = true;
  }
  in.finish();
  return out;
}

LampertiResult sample_lamperti(double alpha, double x, const std::vector<double>& t_grid, Rng& rng,
                               const LampertiOptions& opt) {
  LampertiResult out;
  Integrator in(alpha, x, t_grid, out);
  const XiJumpSource source(opt.eps_cut);
  const double b = source.drift();
  const double sigma = std::sqrt(source.small_variance());
  const bool want_zeta = alpha == -1.0 && (opt.need_zeta || (opt.record_jumps && std::isinf(opt.record_until)));
  if (alpha != -1.0 && opt.record_jumps && std::isinf(opt.record_until) && t_grid.empty()) {
    throw std::invalid_argument("jump recording needs a finite horizon unless alpha = -1");
  }
  const double t_needed = std::max(t_grid.empty() ? 0.0 : t_grid.back(),
                                   opt.record_jumps && std::isfinite(opt.record_until) ? opt.record_until : 0.0);

  for (;;) {
    const double wait = source.next_wait(rng);
    if (opt.gaussian) {
      in.segment(0.5 * wait, b);
      in.jump(sigma * std::sqrt(wait) * rng.normal(), nullptr);
      in.segment(0.5 * wait, b);
    } else {
      in.segment(wait, b);
    }
    in.jump(source.next_size(rng), &opt);

    if (alpha == -1.0) {
      const double rest = std::exp(in.xi()) * kZetaEnvelope;
      if (rest < opt.zeta_rel_tol * in.integral()) {
        in.close_with_zeta(in.integral(), rest);
        break;
      }
    }
    if (!want_zeta && in.grid_done() && in.x_time() >= t_needed) break;
    if (opt.stop_level > 0.0 && in.level() < opt.stop_level) {
      out.stopped_low = true;
      break;
    }
    if (in.s() > opt.max_xi_time) {
      out.hit_limit = true;
      break;
    }
  }
  in.finish();
  return out;
}

}  // namespace peelkit::levy
