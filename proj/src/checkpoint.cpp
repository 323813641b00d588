#include "pearlplus/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pearlplus {

namespace {

void write_header(std::ostream& os, const CheckpointHeader& h) {
  os.write(kCheckpointMagic, 4);
  os.write(reinterpret_cast<const char*>(&h.version), sizeof(h.version));
  os.write(reinterpret_cast<const char*>(&h.config_hash), sizeof(h.config_hash));
  os.write(reinterpret_cast<const char*>(&h.iteration), sizeof(h.iteration));
  os.write(reinterpret_cast<const char*>(&h.env_steps), sizeof(h.env_steps));
}

CheckpointHeader read_header(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic bytes");
  }
  CheckpointHeader h;
  is.read(reinterpret_cast<char*>(&h.version), sizeof(h.version));
  is.read(reinterpret_cast<char*>(&h.config_hash), sizeof(h.config_hash));
  is.read(reinterpret_cast<char*>(&h.iteration), sizeof(h.iteration));
  is.read(reinterpret_cast<char*>(&h.env_steps), sizeof(h.env_steps));
  if (!is) throw std::runtime_error("checkpoint: truncated header");
  return h;
}

}  // namespace

void save_checkpoint(const std::string& path, const MetaTrainer& trainer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  CheckpointHeader h;
  h.config_hash = config_hash(trainer.config());
  h.iteration = trainer.iteration();
  h.env_steps = trainer.env_steps();
  write_header(os, h);
  trainer.save_state(os);
  if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

void load_checkpoint(const std::string& path, MetaTrainer& trainer) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
  CheckpointHeader h = read_header(is);
  if (h.version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(h.version));
  }
  const std::uint64_t want = config_hash(trainer.config());
  if (h.config_hash != want) {
    throw std::runtime_error("checkpoint: config hash mismatch; refusing to resume");
  }
  trainer.load_state(is);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
  return read_header(is);
}

std::string inspect_checkpoint(const std::string& path) {
  CheckpointHeader h = read_checkpoint_header(path);
  nlohmann::json j = {{"version", h.version},
                      {"config_hash", h.config_hash},
                      {"iteration", h.iteration},
                      {"env_steps", h.env_steps}};
  return j.dump(2);
}

}  // namespace pearlplus
