#include "pearlplus/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pearlplus {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
  std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::vector<double> Rng::normal_vec(std::size_t n) {
  std::vector<double> out(n);
  for (auto& x : out) x = normal();
  return out;
}

void Rng::save(std::ostream& os) const {
  std::ostringstream state;
  state << engine_;
  const std::string s = state.str();
  std::uint64_t len = s.size();
  os.write(reinterpret_cast<const char*>(&len), sizeof(len));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
  char spare_flag = has_spare_ ? 1 : 0;
  os.write(&spare_flag, 1);
  os.write(reinterpret_cast<const char*>(&spare_), sizeof(spare_));
}

void Rng::load(std::istream& is) {
  std::uint64_t len = 0;
  is.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  std::istringstream state(s);
  state >> engine_;
  char spare_flag = 0;
  is.read(&spare_flag, 1);
  has_spare_ = spare_flag != 0;
  is.read(reinterpret_cast<char*>(&spare_), sizeof(spare_));
  if (!is) throw std::runtime_error("Rng::load: truncated stream");
}

Rng& RngPool::stream(const std::string& name) {
  auto it = streams_.find(name);
  if (it == streams_.end()) {
    it = streams_.emplace(name, Rng(derived_seed(name))).first;
  }
  return it->second;
}

std::uint64_t RngPool::derived_seed(std::string_view name) const {
  return splitmix64(root_ ^ fnv1a64(name));
}

void RngPool::save(std::ostream& os) const {
  os.write(reinterpret_cast<const char*>(&root_), sizeof(root_));
  std::uint64_t n = streams_.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const auto& [name, rng] : streams_) {
    std::uint64_t len = name.size();
    os.write(reinterpret_cast<const char*>(&len), sizeof(len));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    rng.save(os);
  }
}

void RngPool::load(std::istream& is) {
  streams_.clear();
  is.read(reinterpret_cast<char*>(&root_), sizeof(root_));
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string name(len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(len));
    Rng rng;
    rng.load(is);
    streams_.emplace(std::move(name), rng);
  }
  if (!is) throw std::runtime_error("RngPool::load: truncated stream");
}

}  // namespace pearlplus
