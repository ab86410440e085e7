#include "peelkit/boltzmann/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace peelkit::boltzmann {

WeightSequence WeightSequence::preset(std::string_view name) {
  if (name != "budd-o2-example") {
    throw std::invalid_argument("unknown weight preset: " + std::string(name));
  }
  WeightSequence w;
  w.kind_ = Kind::budd_o2;
  w.descriptor_ = std::string(name);
  w.radius_ = 3.0 * M_PI;
  w.summable_at_radius_ = true;
  w.support_end_ = kUnbounded;
  w.table_end_ = 1;
  w.tail_hint_ = 2.0;
  return w;
}

WeightSequence WeightSequence::from_table(const std::map<long, double>& entries, TailRule tail) {
  WeightSequence w;
  w.kind_ = Kind::table;
  w.tail_ = tail;
  long last = 0;
  bool any_positive = false;
  for (const auto& [k, q] : entries) {
    if (k < 1) throw std::invalid_argument("weight index must be >= 1, got " + std::to_string(k));
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw std::invalid_argument("weight q_" + std::to_string(k) + " is negative or not finite");
    }
    if (q > 0.0) {
      any_positive = true;
      last = std::max(last, k);
    }
  }
  if (!any_positive) throw std::invalid_argument("weight sequence is identically zero");

  w.table_.assign(static_cast<std::size_t>(last), 0.0);
  for (const auto& [k, q] : entries) {
    if (k <= last) w.table_[k - 1] = q;
  }
  w.table_end_ = last;
  w.descriptor_ = "table";
  if (tail == TailRule::geometric) {
    if (last < 2 || w.table_[last - 2] <= 0.0) {
      throw std::invalid_argument("geometric tail needs two trailing positive weights");
    }
    w.ratio_ = w.table_[last - 1] / w.table_[last - 2];
    w.radius_ = 1.0 / w.ratio_;
    w.summable_at_radius_ = false;
    w.support_end_ = kUnbounded;
    w.descriptor_ = "table+geometric";
  } else {
    w.support_end_ = last;
  }
  return w;
}

double WeightSequence::scaled(double k, double c) const {
  if (k < 1.0) return 0.0;
  if (kind_ == Kind::budd_o2) {
    const double base = 2.0 / (M_PI * (2.0 * k - 3.0) * (2.0 * k - 1.0)) + (k < 1.5 ? 1.0 : 0.0);
    return base * std::pow(c / (3.0 * M_PI), k - 1.0);
  }
  const double end = static_cast<double>(table_end_);
  if (k <= end) {
    const long i = std::lround(k);
    return table_[i - 1] * std::pow(c, k - 1.0);
  }
  if (tail_ == TailRule::zero) return 0.0;
  const double q_end = table_.back();
  return q_end * std::pow(c, end - 1.0) * std::pow(ratio_ * c, k - end);
}

}  // namespace peelkit::boltzmann
