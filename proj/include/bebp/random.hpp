#ifndef BEBP_RANDOM_HPP
#define BEBP_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace bebp {

// Portable RNG wrapper. The standard distributions are implementation
// defined, so every draw used by the library goes through these helpers to
// keep outputs byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, bound). bound must be > 0.
  std::size_t index(std::size_t bound);
  double normal();

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);
  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless seed derivation (splitmix64 over the pair).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace bebp

#endif  // BEBP_RANDOM_HPP
