#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "landrl/env.hpp"
#include "landrl/errors.hpp"
#include "landrl/replay.hpp"
#include "landrl/rng.hpp"

using landrl::ConfigError;
using landrl::InsufficientDataError;
using landrl::IoError;
using landrl::Rng;
using landrl::StateError;
using landrl::env::Lander;
using landrl::env::Observation;
using landrl::replay::ReplayBuffer;
using landrl::replay::Transition;

namespace {

Transition make_tr(int k) {
  Transition t;
  for (int i = 0; i < 8; ++i) {
    t.state[i] = k + i * 0.125;
    t.next_state[i] = k - i * 0.25;
  }
  t.action = k % 4;
  t.reward = 0.5 * k - 3.0;
  t.done = k % 7 == 0;
  return t;
}

bool same_tr(const Transition& a, const Transition& b) {
  return (a.state.array() == b.state.array()).all() && a.action == b.action &&
         a.reward == b.reward &&
         (a.next_state.array() == b.next_state.array()).all() &&
         a.done == b.done;
}

}  // namespace

TEST_CASE("capacity must be positive") {
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
  CHECK_THROWS_AS(ReplayBuffer(-3), ConfigError);
}

TEST_CASE("ring matches a plain FIFO list") {
  // Oracle: a deque that pops its front once past capacity.
  const int cap = 16;
  ReplayBuffer buf(cap);
  std::deque<Transition> model;
  for (int k = 0; k < 100; ++k) {
    buf.push(make_tr(k));
    model.push_back(make_tr(k));
    if (static_cast<int>(model.size()) > cap) model.pop_front();

    CHECK(buf.capacity() == cap);
    CHECK(buf.count() == static_cast<int>(model.size()));
    CHECK(buf.full() == (buf.count() == cap));
    CHECK(buf.write_cursor() == (k + 1) % cap);

    auto got = buf.contents_in_order();
    REQUIRE(got.size() == model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
      CHECK(same_tr(got[i], model[i]));
  }
}

TEST_CASE("overwrite happens in place at the cursor") {
  ReplayBuffer buf(4);
  for (int k = 0; k < 4; ++k) buf.push(make_tr(k));
  CHECK(same_tr(buf.at_slot(0), make_tr(0)));
  buf.push(make_tr(99));
  CHECK(same_tr(buf.at_slot(0), make_tr(99)));
  CHECK(same_tr(buf.at_slot(1), make_tr(1)));
  CHECK(buf.count() == 4);
}

TEST_CASE("sample draws distinct slots and never mutates") {
  ReplayBuffer buf(32);
  for (int k = 0; k < 32; ++k) buf.push(make_tr(k));
  auto before = buf.contents_in_order();

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    auto batch = buf.sample(10, rng);
    REQUIRE(batch.size() == 10);
    std::set<double> rewards;  // rewards are unique per transition here
    for (const auto& t : batch) rewards.insert(t.reward);
    CHECK(rewards.size() == 10);
  }

  auto after = buf.contents_in_order();
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(same_tr(before[i], after[i]));
}

TEST_CASE("sample is deterministic in the generator state") {
  ReplayBuffer buf(64);
  for (int k = 0; k < 64; ++k) buf.push(make_tr(k));
  Rng a(777);
  Rng b(777);
  auto x = buf.sample(16, a);
  auto y = buf.sample(16, b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same_tr(x[i], y[i]));
}

TEST_CASE("sampling the whole buffer is a permutation") {
  ReplayBuffer buf(12);
  for (int k = 0; k < 12; ++k) buf.push(make_tr(k));
  Rng rng(5);
  auto batch = buf.sample(12, rng);
  std::set<double> rewards;
  for (const auto& t : batch) rewards.insert(t.reward);
  CHECK(rewards.size() == 12);
}

TEST_CASE("sample rejects bad batch sizes") {
  ReplayBuffer buf(8);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), InsufficientDataError);
  for (int k = 0; k < 5; ++k) buf.push(make_tr(k));
  CHECK_THROWS_AS(buf.sample(6, rng), InsufficientDataError);
  CHECK_THROWS_AS(buf.sample(-1, rng), std::invalid_argument);
  CHECK(buf.sample(0, rng).empty());
  CHECK(buf.sample(5, rng).size() == 5);
}

TEST_CASE("per-slot inclusion frequency is flat") {
  // Each of the 20 slots should land in a batch of 5 with p = 1/4. Over
  // 20000 draws the hit count is binomial; 4.5 sigma keeps the check far
  // from the noise floor while still catching a skewed sampler.
  const int slots = 20;
  const int batch = 5;
  const int draws = 20000;
  ReplayBuffer buf(slots);
  for (int k = 0; k < slots; ++k) buf.push(make_tr(k));

  std::vector<int> hits(slots, 0);
  Rng rng(20240817);
  for (int d = 0; d < draws; ++d) {
    for (const auto& t : buf.sample(batch, rng)) {
      auto idx = static_cast<int>(std::lround((t.reward + 3.0) / 0.5));
      hits[idx] += 1;
    }
  }

  const double p = static_cast<double>(batch) / slots;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  for (int s = 0; s < slots; ++s)
    CHECK(std::abs(hits[s] - mean) < 4.5 * sigma);
}

TEST_CASE("replacement sampling repeats; plain sampling cannot") {
  ReplayBuffer buf(3);
  for (int k = 0; k < 3; ++k) buf.push(make_tr(k));
  Rng rng(9);
  bool saw_duplicate = false;
  for (int trial = 0; trial < 20 && !saw_duplicate; ++trial) {
    auto batch = buf.sample_with_replacement(8, rng);
    REQUIRE(batch.size() == 8);
    std::set<double> rewards;
    for (const auto& t : batch) rewards.insert(t.reward);
    saw_duplicate = rewards.size() < batch.size();
  }
  CHECK(saw_duplicate);
}

TEST_CASE("random seeding fills the buffer deterministically") {
  const int cap = 400;
  ReplayBuffer a(cap);
  ReplayBuffer b(cap);
  ReplayBuffer c(cap);
  Lander ea, eb, ec;
  landrl::replay::seed_random(a, ea, 42);
  landrl::replay::seed_random(b, eb, 42);
  landrl::replay::seed_random(c, ec, 43);

  CHECK(a.full());
  CHECK(a.count() == cap);

  auto xs = a.contents_in_order();
  auto ys = b.contents_in_order();
  auto zs = c.contents_in_order();
  bool differs = false;
  for (int i = 0; i < cap; ++i) {
    CHECK(same_tr(xs[i], ys[i]));
    if (!same_tr(xs[i], zs[i])) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("seeded transitions chain within episodes") {
  ReplayBuffer buf(300);
  Lander env;
  landrl::replay::seed_random(buf, env, 7);
  auto ts = buf.contents_in_order();

  int episode_ends = 0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i].done) {
      episode_ends += 1;
      continue;  // next state comes from a fresh reset
    }
    CHECK((ts[i].next_state.array() == ts[i + 1].state.array()).all());
  }
  // Random flight from altitude ends well before 300 steps, so the fill
  // spans several episodes.
  CHECK(episode_ends >= 1);
  for (const auto& t : ts) {
    CHECK(t.action >= 0);
    CHECK(t.action <= 3);
  }
}

TEST_CASE("seeding a non-empty buffer is refused") {
  ReplayBuffer buf(10);
  buf.push(make_tr(0));
  Lander env;
  CHECK_THROWS_AS(landrl::replay::seed_random(buf, env, 1), StateError);
}

TEST_CASE("snapshot round-trips bitwise") {
  auto path = std::filesystem::temp_directory_path() / "landrl_replay_rt.bin";
  for (int pushes : {5, 16, 23}) {
    ReplayBuffer buf(16);
    for (int k = 0; k < pushes; ++k) buf.push(make_tr(k));
    landrl::replay::save_snapshot(buf, path);
    ReplayBuffer back = landrl::replay::load_snapshot(path);
    CHECK(back.capacity() == buf.capacity());
    CHECK(back.count() == buf.count());
    CHECK(back.write_cursor() == buf.write_cursor());
    auto xs = buf.contents_in_order();
    auto ys = back.contents_in_order();
    REQUIRE(xs.size() == ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(same_tr(xs[i], ys[i]));
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading a missing snapshot raises IoError") {
  CHECK_THROWS_AS(
      landrl::replay::load_snapshot("/nonexistent/landrl_nowhere.bin"),
      IoError);
}
