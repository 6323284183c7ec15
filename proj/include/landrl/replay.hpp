#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "landrl/env.hpp"
#include "landrl/rng.hpp"

namespace landrl::replay {

// One stored experience. Observations are the normalized 8-vectors the
// network consumes; next_state is kept even when done is set (it is the
// terminal observation).
struct Transition {
  env::Observation state;
  int action = 0;
  double reward = 0.0;
  env::Observation next_state;
  bool done = false;
};

// Fixed-capacity FIFO ring. Once full it stays full; each further push
// evicts exactly the oldest transition. Single writer; sampling never
// mutates.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);  // capacity >= 1, else ConfigError

  void push(const Transition& t);

  // batch_size distinct transitions drawn uniformly without replacement.
  // Throws InsufficientDataError when batch_size > count().
  std::vector<Transition> sample(int batch_size, Rng& rng) const;

  // Uniform with replacement; duplicates possible within a batch.
  std::vector<Transition> sample_with_replacement(int batch_size,
                                                  Rng& rng) const;

  int capacity() const { return capacity_; }
  int count() const { return count_; }
  int write_cursor() const { return cursor_; }
  bool full() const { return count_ == capacity_; }

  // Transitions oldest-first, for inspection and tests.
  std::vector<Transition> contents_in_order() const;
  const Transition& at_slot(int slot) const { return storage_[slot]; }

 private:
  friend ReplayBuffer load_snapshot(const std::filesystem::path& path);

  int capacity_;
  int count_ = 0;
  int cursor_ = 0;
  std::vector<Transition> storage_;
};

// Fills an empty buffer to capacity by rolling out uniformly random actions
// in env, restarting episodes on termination. Deterministic in seed.
// Throws StateError if the buffer is not empty.
void seed_random(ReplayBuffer& buffer, env::Lander& env, std::uint64_t seed);

// Debug snapshot: little-endian binary, header (magic "RPLB", u64 version,
// capacity, count, cursor) then one 19-double record per stored transition
// in slot order: state[8], action, reward, next_state[8], done.
void save_snapshot(const ReplayBuffer& buffer,
                   const std::filesystem::path& path);
ReplayBuffer load_snapshot(const std::filesystem::path& path);

}  // namespace landrl::replay
