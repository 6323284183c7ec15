#include "landrl/replay.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "landrl/errors.hpp"

namespace landrl::replay {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("replay capacity must be >= 1");
  storage_.reserve(static_cast<std::size_t>(capacity));
}

void ReplayBuffer::push(const Transition& t) {
  if (count_ < capacity_) {
    storage_.push_back(t);
    count_ += 1;
  } else {
    storage_[static_cast<std::size_t>(cursor_)] = t;
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (batch_size < 0) throw std::invalid_argument("batch size must be >= 0");
  if (batch_size > count_)
    throw InsufficientDataError("batch of " + std::to_string(batch_size) +
                                " requested from " + std::to_string(count_) +
                                " stored transitions");
  // Floyd's sampler: every slot is equally likely, no slot repeats, and
  // exactly batch_size values are consumed from rng.
  std::vector<Transition> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  std::set<int> seen;
  for (int j = count_ - batch_size; j < count_; ++j) {
    int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (!seen.insert(pick).second) {
      pick = j;
      seen.insert(j);
    }
    batch.push_back(storage_[static_cast<std::size_t>(pick)]);
  }
  return batch;
}

std::vector<Transition> ReplayBuffer::sample_with_replacement(int batch_size,
                                                              Rng& rng) const {
  if (batch_size < 0) throw std::invalid_argument("batch size must be >= 0");
  if (count_ == 0 && batch_size > 0)
    throw InsufficientDataError("sampling from an empty buffer");
  std::vector<Transition> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  for (int i = 0; i < batch_size; ++i) {
    auto pick = rng.below(static_cast<std::uint64_t>(count_));
    batch.push_back(storage_[static_cast<std::size_t>(pick)]);
  }
  return batch;
}

std::vector<Transition> ReplayBuffer::contents_in_order() const {
  std::vector<Transition> out;
  out.reserve(static_cast<std::size_t>(count_));
  const int start = full() ? cursor_ : 0;
  for (int i = 0; i < count_; ++i)
    out.push_back(storage_[static_cast<std::size_t>((start + i) % capacity_)]);
  return out;
}

void seed_random(ReplayBuffer& buffer, env::Lander& env, std::uint64_t seed) {
  if (buffer.count() != 0)
    throw StateError("random seeding expects an empty buffer");
  Rng rng(seed);
  env::Observation obs = env.reset(rng.next_u64());
  while (!buffer.full()) {
    const int action = rng.uniform_int(0, 3);
    auto r = env.step(action);
    buffer.push({obs, action, r.reward, r.observation, r.done});
    obs = r.done ? env.reset(rng.next_u64()) : r.observation;
  }
}

namespace {

constexpr char kMagic[4] = {'R', 'P', 'L', 'B'};
constexpr std::uint64_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoError("snapshot truncated while reading " + what);
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoError("snapshot truncated inside a record");
  return v;
}

}  // namespace

void save_snapshot(const ReplayBuffer& buffer,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  put_u64(out, kVersion);
  put_u64(out, static_cast<std::uint64_t>(buffer.capacity()));
  put_u64(out, static_cast<std::uint64_t>(buffer.count()));
  put_u64(out, static_cast<std::uint64_t>(buffer.write_cursor()));
  for (int slot = 0; slot < buffer.count(); ++slot) {
    const Transition& t = buffer.at_slot(slot);
    for (int i = 0; i < 8; ++i) put_f64(out, t.state[i]);
    put_f64(out, static_cast<double>(t.action));
    put_f64(out, t.reward);
    for (int i = 0; i < 8; ++i) put_f64(out, t.next_state[i]);
    put_f64(out, t.done ? 1.0 : 0.0);
  }
  if (!out) throw IoError("write to " + path.string() + " failed");
}

ReplayBuffer load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  if (!in.read(magic, sizeof magic) ||
      !std::equal(magic, magic + 4, kMagic))
    throw IoError(path.string() + " is not a replay snapshot");
  if (get_u64(in, "version") != kVersion)
    throw IoError("unsupported snapshot version in " + path.string());
  const auto capacity = static_cast<int>(get_u64(in, "capacity"));
  const auto count = static_cast<int>(get_u64(in, "count"));
  const auto cursor = static_cast<int>(get_u64(in, "cursor"));
  if (capacity < 1 || count < 0 || count > capacity || cursor < 0 ||
      cursor >= capacity)
    throw IoError("inconsistent snapshot header in " + path.string());

  ReplayBuffer buffer(capacity);
  buffer.count_ = count;
  buffer.cursor_ = cursor;
  buffer.storage_.resize(static_cast<std::size_t>(count));
  for (int slot = 0; slot < count; ++slot) {
    Transition& t = buffer.storage_[static_cast<std::size_t>(slot)];
    for (int i = 0; i < 8; ++i) t.state[i] = get_f64(in);
    t.action = static_cast<int>(get_f64(in));
    t.reward = get_f64(in);
    for (int i = 0; i < 8; ++i) t.next_state[i] = get_f64(in);
    t.done = get_f64(in) != 0.0;
  }
  return buffer;
}

}  // namespace landrl::replay
