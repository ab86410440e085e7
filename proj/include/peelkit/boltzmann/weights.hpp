#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace peelkit::boltzmann {

/// How a finite user table is continued past its last entry.
enum class TailRule { zero, geometric };

/// Face weights q_k (weight of a face of degree 2k), k >= 1.
class WeightSequence {
 public:
  static constexpr long kUnbounded = std::numeric_limits<long>::max();

  /// Built-in presets. Only "budd-o2-example" is defined.
  static WeightSequence preset(std::string_view name);

  /// Finite table {k: q_k}; absent indices are zero.
  static WeightSequence from_table(const std::map<long, double>& entries, TailRule tail = TailRule::zero);

  double operator()(long k) const { return scaled(static_cast<double>(k), 1.0); }

  /// q_k c^{k-1}. Non-integer k is allowed past table_end() and evaluates the
  /// continuous tail used for series remainders.
  double scaled(double k, double c) const;

  /// Radius of convergence of Σ q_k x^{k-1}.
  double growth_radius() const { return radius_; }
  bool summable_at_radius() const { return summable_at_radius_; }

  /// Largest index with q_k > 0, or kUnbounded.
  long support_end() const { return support_end_; }

  /// Last index evaluated from explicit data; beyond it scaled() is smooth in k.
  long table_end() const { return table_end_; }

  const std::string& descriptor() const { return descriptor_; }

  /// Exponent a in q_k c^{k-1} ~ k^{-a}, when known.
  std::optional<double> tail_exponent_hint() const { return tail_hint_; }

 private:
  enum class Kind { budd_o2, table };

  Kind kind_ = Kind::table;
  std::string descriptor_;
  std::vector<double> table_;  // table_[k-1] = q_k
  TailRule tail_ = TailRule::zero;
  double ratio_ = 0.0;  // geometric tail ratio
  double radius_ = std::numeric_limits<double>::infinity();
  bool summable_at_radius_ = false;
  long support_end_ = 0;
  long table_end_ = 0;
  std::optional<double> tail_hint_;
};

inline WeightSequence make_weight_sequence(std::string_view preset) { return WeightSequence::preset(preset); }

inline WeightSequence make_weight_sequence(const std::map<long, double>& table, TailRule tail = TailRule::zero) {
  return WeightSequence::from_table(table, tail);
}

}  // namespace peelkit::boltzmann
