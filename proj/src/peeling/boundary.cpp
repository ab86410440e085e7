#include "peelkit/peeling/boundary.hpp"

#include <algorithm>
#include <stdexcept>

namespace peelkit::peeling {

namespace {

void check_event(long p, const PeelEvent& e, Mode mode) {
  if (p < 1) throw std::logic_error("peel_step on an absorbed boundary");
  if (e.kind == PeelEvent::Kind::C) {
    if (e.param < 1) throw std::invalid_argument("C(k) needs k >= 1");
    return;
  }
  const long j = e.param;
  if (j < 0 || j >= p) throw std::invalid_argument("event " + e.str() + " inconsistent with p = " + std::to_string(p));
  if (mode == Mode::finite && j > p - 1 - j) {
    throw std::invalid_argument("event " + e.str() + " fills the larger hole at p = " + std::to_string(p));
  }
  if (mode == Mode::infinite && j > p - 2) {
    throw std::invalid_argument("event " + e.str() + " leaves no infinite side at p = " + std::to_string(p));
  }
}

}  // namespace

LayeredBoundary LayeredBoundary::root(long ell) {
  if (ell < 1) throw std::invalid_argument("root perimeter must be >= 1");
  return {ell, 0, 2 * ell};
}

std::vector<bool> LayeredBoundary::word() const {
  std::vector<bool> w(static_cast<std::size_t>(2 * p), false);
  std::fill(w.begin(), w.begin() + m, true);
  return w;
}

std::pair<LayeredBoundary, StepOutcome> peel_step(const LayeredBoundary& s, const PeelEvent& e, Mode mode) {
  check_event(s.p, e, mode);
  if (s.m < 1) throw std::logic_error("cursor not on a low edge");
  LayeredBoundary next = s;
  StepOutcome out;
  if (e.kind == PeelEvent::Kind::C) {
    next.p = s.p + e.param - 1;
    next.m = s.m - 1;
    out.face_degree = 2 * e.param;
  } else {
    const long j = e.param;
    next.p = s.p - 1 - j;
    if (e.side == Side::right) {
      next.m = std::max(0L, s.m - (2 * j + 2));
    } else {
      next.m = std::min(s.m - 1, 2 * s.p - 2 * j - 2);
    }
    out.swallowed = j;
  }
  if (next.p == 0) {
    next.m = 0;
    out.absorbed = true;
  } else if (next.m == 0) {
    next.h += 1;
    next.m = 2 * next.p;
    out.height_increment = 1;
  }
  return {next, out};
}

ExplicitBoundary::ExplicitBoundary(long ell) : labels_(static_cast<std::size_t>(2 * ell), true) {
  if (ell < 1) throw std::invalid_argument("root perimeter must be >= 1");
}

long ExplicitBoundary::low_count() const { return std::count(labels_.begin(), labels_.end(), true); }

bool ExplicitBoundary::low_arc_contiguous() const {
  const std::size_t n = labels_.size();
  if (n == 0) return true;
  if (!labels_[0]) return false;
  std::size_t rises = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] && !labels_[(i + n - 1) % n]) ++rises;
  }
  return rises <= 1 && (rises == 1 || low_count() == static_cast<long>(n));
}

void ExplicitBoundary::normalize() {
  if (labels_.empty()) return;
  const std::size_t n = labels_.size();
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] && !labels_[(i + n - 1) % n]) {
      start = i;
      break;
    }
  }
  if (start == n) {
    if (!labels_[0]) {
      ++h_;
      std::fill(labels_.begin(), labels_.end(), true);
    }
    return;
  }
  std::rotate(labels_.begin(), labels_.begin() + static_cast<long>(start), labels_.end());
}

StepOutcome ExplicitBoundary::apply(const PeelEvent& e, Mode mode) {
  const long p0 = p();
  check_event(p0, e, mode);
  if (!labels_[0]) throw std::logic_error("cursor not on a low edge");
  const long h0 = h_;
  StepOutcome out;
  std::vector<bool> next;
  if (e.kind == PeelEvent::Kind::C) {
    next.assign(static_cast<std::size_t>(2 * e.param - 1), false);
    next.insert(next.end(), labels_.begin() + 1, labels_.end());
    out.face_degree = 2 * e.param;
  } else {
    const long j = e.param;
    if (e.side == Side::right) {
      next.assign(labels_.begin() + (2 * j + 2), labels_.end());
    } else {
      next.assign(labels_.begin() + 1, labels_.begin() + (2 * p0 - 2 * j - 1));
    }
    out.swallowed = j;
  }
  labels_ = std::move(next);
  if (labels_.empty()) {
    out.absorbed = true;
    return out;
  }
  normalize();
  out.height_increment = h_ - h0;
  return out;
}

}  // namespace peelkit::peeling
