#ifndef RELUCOST_RNG_HPP_
#define RELUCOST_RNG_HPP_

#include <cstdint>

namespace relucost {

// Counter-based generator: the i-th draw of a stream is a pure function of
// (key, i), so sub-streams split off a single seed are reproducible
// independently of how work is scheduled.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  // Independent child stream; does not advance this generator.
  CounterRng Split(std::uint64_t stream) const;

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Standard normal via Box-Muller.
  double Normal();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return NextU64(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace relucost

#endif  // RELUCOST_RNG_HPP_
