#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pearlplus/envs/env.hpp"
#include "pearlplus/rng.hpp"

namespace pearlplus {

// One context tuple (s, a, r, s') plus terminal flag. `pass_id` tags the
// collection pass that produced it.
struct Transition {
  std::vector<double> state;
  Action action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  std::uint32_t pass_id = 0;
};

// Per-task ring buffer. The context sampler draws only from the most recent
// collection pass; the RL sampler draws from the whole buffer.
class TaskBuffer {
 public:
  explicit TaskBuffer(std::size_t capacity);

  // Marks the start of a new collection pass; subsequent pushes form the
  // recent-batch region.
  void begin_pass();
  void push(Transition tr);

  std::size_t size() const;
  std::size_t recent_size() const { return static_cast<std::size_t>(total_ - pass_start_); }
  std::size_t capacity() const { return capacity_; }
  std::uint32_t current_pass() const { return pass_id_; }

  const Transition& sample_recent(Rng& rng) const;
  const Transition& sample_any(Rng& rng) const;
  // All transitions of the recent region, oldest first.
  std::vector<const Transition*> recent_region() const;

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  const Transition& slot(std::uint64_t virtual_index) const;

  std::size_t capacity_ = 0;
  std::vector<Transition> data_;
  std::uint64_t total_ = 0;       // transitions ever pushed
  std::uint64_t pass_start_ = 0;  // first virtual index of the recent region
  std::uint32_t pass_id_ = 0;
};

}  // namespace pearlplus
