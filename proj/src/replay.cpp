#include "pearlplus/replay.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace pearlplus {

TaskBuffer::TaskBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("TaskBuffer: capacity must be positive");
}

void TaskBuffer::begin_pass() {
  pass_id_ += 1;
  pass_start_ = total_;
}

void TaskBuffer::push(Transition tr) {
  tr.pass_id = pass_id_;
  const std::size_t slot_index = static_cast<std::size_t>(total_ % capacity_);
  if (data_.size() <= slot_index) {
    data_.resize(slot_index + 1);
  }
  data_[slot_index] = std::move(tr);
  total_ += 1;
  // ring overwrite may never eat into the live recent region
  if (total_ - pass_start_ > capacity_) {
    throw std::runtime_error("TaskBuffer: collection pass exceeds buffer capacity");
  }
}

std::size_t TaskBuffer::size() const {
  return static_cast<std::size_t>(std::min<std::uint64_t>(total_, capacity_));
}

const Transition& TaskBuffer::slot(std::uint64_t virtual_index) const {
  return data_[static_cast<std::size_t>(virtual_index % capacity_)];
}

const Transition& TaskBuffer::sample_recent(Rng& rng) const {
  if (recent_size() == 0) throw std::runtime_error("TaskBuffer: empty recent region");
  const std::uint64_t offset = rng.index(recent_size());
  return slot(pass_start_ + offset);
}

const Transition& TaskBuffer::sample_any(Rng& rng) const {
  if (size() == 0) throw std::runtime_error("TaskBuffer: empty buffer");
  const std::uint64_t first = total_ > capacity_ ? total_ - capacity_ : 0;
  const std::uint64_t offset = rng.index(static_cast<std::size_t>(total_ - first));
  return slot(first + offset);
}

std::vector<const Transition*> TaskBuffer::recent_region() const {
  std::vector<const Transition*> out;
  out.reserve(recent_size());
  for (std::uint64_t v = pass_start_; v < total_; ++v) out.push_back(&slot(v));
  return out;
}

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_vec(std::ostream& os, const std::vector<double>& v) {
  write_pod<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_vec(std::istream& is, std::vector<double>& v) {
  std::uint64_t n = 0;
  read_pod(is, n);
  v.resize(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void TaskBuffer::save(std::ostream& os) const {
  write_pod<std::uint64_t>(os, capacity_);
  write_pod(os, total_);
  write_pod(os, pass_start_);
  write_pod(os, pass_id_);
  write_pod<std::uint64_t>(os, data_.size());
  for (const Transition& tr : data_) {
    write_vec(os, tr.state);
    write_pod<std::int32_t>(os, tr.action.discrete);
    write_vec(os, tr.action.continuous);
    write_pod(os, tr.reward);
    write_vec(os, tr.next_state);
    write_pod<std::uint8_t>(os, tr.terminal ? 1 : 0);
    write_pod(os, tr.pass_id);
  }
}

void TaskBuffer::load(std::istream& is) {
  std::uint64_t cap = 0;
  read_pod(is, cap);
  capacity_ = static_cast<std::size_t>(cap);
  read_pod(is, total_);
  read_pod(is, pass_start_);
  read_pod(is, pass_id_);
  std::uint64_t n = 0;
  read_pod(is, n);
  data_.assign(static_cast<std::size_t>(n), Transition{});
  for (Transition& tr : data_) {
    read_vec(is, tr.state);
    std::int32_t d = -1;
    read_pod(is, d);
    tr.action.discrete = d;
    read_vec(is, tr.action.continuous);
    read_pod(is, tr.reward);
    read_vec(is, tr.next_state);
    std::uint8_t term = 0;
    read_pod(is, term);
    tr.terminal = term != 0;
    read_pod(is, tr.pass_id);
  }
  if (!is) throw std::runtime_error("TaskBuffer::load: truncated stream");
}

}  // namespace pearlplus
