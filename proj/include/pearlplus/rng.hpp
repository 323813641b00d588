#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pearlplus {

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic random stream. All draws go through our own conversions so
// results do not depend on the standard library's distribution internals.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n);

  // standard normal, Box-Muller with one cached value
  double normal();

  std::vector<double> normal_vec(std::size_t n);

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Named substreams derived from one root seed. Adding a consumer of a new
// stream never perturbs draws from existing streams.
class RngPool {
 public:
  explicit RngPool(std::uint64_t root_seed) : root_(root_seed) {}

  Rng& stream(const std::string& name);

  std::uint64_t root_seed() const { return root_; }

  // Seed a stream would get, without materializing it.
  std::uint64_t derived_seed(std::string_view name) const;

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  std::uint64_t root_;
  std::map<std::string, Rng> streams_;
};

}  // namespace pearlplus
