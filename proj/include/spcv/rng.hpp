#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <utility>

namespace spcv {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a; stable across platforms, used to fold names into seeds.
std::uint64_t hash_text(std::string_view text) noexcept;

/// Folds an ordered list of components into a child seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept;

/// Random stream with platform-independent distributions.
///
/// The engine is std::mt19937_64 (output fully specified by the standard);
/// the distribution helpers are implemented here because the std::
/// distributions are allowed to differ between standard libraries, which
/// would break seed-for-seed reproducibility of experiments.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }

  /// Uniform integer on [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  /// Uniform integer on [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller.
  double normal();

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spcv
