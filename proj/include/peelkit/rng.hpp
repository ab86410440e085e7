#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace peelkit {

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_name(std::string_view name);

/// Reproducible random stream.
///
/// Variates are built from the raw 64-bit engine output instead of the
/// standard distributions, whose algorithms are implementation-defined, so a
/// given seed yields the same numbers with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream for one replicate of one experiment.
  static Rng stream(std::uint64_t master_seed, std::uint64_t experiment, std::uint64_t replicate);

  /// Independent child stream keyed by `key`; does not advance this stream.
  Rng child(std::uint64_t key) const;

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential();
  double normal();
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace peelkit
