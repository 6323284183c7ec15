#include "landrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "landrl/errors.hpp"
#include "landrl/rng.hpp"
#include "landrl/text.hpp"

namespace landrl::env {

namespace {

double clip(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

double potential(const EnvConfig& c, const EnvState& s) {
  return -c.shaping_position * std::hypot(s.x, s.y) -
         c.shaping_velocity * std::hypot(s.vx, s.vy) -
         c.shaping_angle * std::abs(s.theta) +
         c.leg_contact_bonus * (s.leg_left ? 1.0 : 0.0) +
         c.leg_contact_bonus * (s.leg_right ? 1.0 : 0.0);
}

double foot_height(const EnvState& s, double ox, double oy) {
  return s.y + ox * std::sin(s.theta) + oy * std::cos(s.theta);
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::landed: return "landed";
    case Outcome::crashed: return "crashed";
    case Outcome::out_of_bounds: return "out_of_bounds";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

void EnvConfig::validate() const {
  if (dt <= 0.0) throw ConfigError("dt must be > 0");
  if (main_accel <= gravity)
    throw ConfigError("main engine must out-accelerate gravity");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (init_vy_min > init_vy_max)
    throw ConfigError("initial vy range is inverted");
}

Lander::Lander(EnvConfig config) : config_(config) { config_.validate(); }

void Lander::refresh_leg_contacts() {
  state_.leg_left =
      foot_height(state_, -config_.leg_x, config_.leg_y) <= 0.0;
  state_.leg_right =
      foot_height(state_, config_.leg_x, config_.leg_y) <= 0.0;
}

Observation Lander::reset(std::uint64_t seed) {
  Rng rng(seed);
  state_ = EnvState{};
  state_.x = rng.uniform(-config_.init_x_range, config_.init_x_range);
  state_.y = config_.init_y;
  state_.vx = rng.uniform(-config_.init_vx_range, config_.init_vx_range);
  state_.vy = rng.uniform(config_.init_vy_min, config_.init_vy_max);
  state_.theta =
      rng.uniform(-config_.init_theta_range, config_.init_theta_range);
  state_.omega =
      rng.uniform(-config_.init_omega_range, config_.init_omega_range);
  state_.step_count = 0;
  refresh_leg_contacts();
  state_.prev_shaping = potential(config_, state_);
  outcome_ = Outcome::running;
  active_ = true;
  return observation();
}

StepResult Lander::step(int action) {
  if (!active_) throw StateError("step before reset");
  if (outcome_ != Outcome::running)
    throw StateError("step on a finished episode");
  if (action < 0 || action > 3)
    throw std::invalid_argument("action must be in [0, 3]");

  const EnvConfig& c = config_;
  double ax = 0.0;
  double ay = -c.gravity;
  double alpha = 0.0;
  if (action == 2) {
    // Main engine pushes along body-up.
    ax += c.main_accel * -std::sin(state_.theta);
    ay += c.main_accel * std::cos(state_.theta);
  } else if (action == 1 || action == 3) {
    // Side thrusters: action 1 kicks the hull toward body-right and spins
    // it counterclockwise, action 3 mirrors that.
    const double sign = action == 1 ? 1.0 : -1.0;
    alpha = sign * c.side_torque;
    ax += sign * c.side_accel * std::cos(state_.theta);
    ay += sign * c.side_accel * std::sin(state_.theta);
  }

  // Semi-implicit Euler: velocities first, then positions with the new
  // velocities.
  state_.vx += ax * c.dt;
  state_.vy += ay * c.dt;
  state_.omega += alpha * c.dt;
  state_.x += state_.vx * c.dt;
  state_.y += state_.vy * c.dt;
  state_.theta += state_.omega * c.dt;
  state_.step_count += 1;

  refresh_leg_contacts();

  const double shaping = potential(c, state_);
  double reward = shaping - state_.prev_shaping.value_or(shaping);
  state_.prev_shaping = shaping;
  if (action == 2) reward -= c.main_engine_cost;
  if (action == 1 || action == 3) reward -= c.side_engine_cost;

  const bool contact = state_.leg_left || state_.leg_right;
  if (state_.y <= 0.0 ||
      (contact && (std::abs(state_.vy) > c.crash_speed ||
                   std::abs(state_.theta) > c.crash_angle))) {
    outcome_ = Outcome::crashed;
    reward -= c.crash_penalty;
  } else if (state_.leg_left && state_.leg_right &&
             std::abs(state_.vx) < c.land_speed &&
             std::abs(state_.vy) < c.land_speed &&
             std::abs(state_.omega) < c.land_omega) {
    outcome_ = Outcome::landed;
    reward += c.land_bonus;
  } else if (std::abs(state_.x) > c.bounds_x) {
    outcome_ = Outcome::out_of_bounds;
    reward -= c.crash_penalty;
  } else if (state_.step_count >= c.max_steps) {
    outcome_ = Outcome::timeout;
  }

  StepResult result;
  result.observation = observation();
  result.reward = reward;
  result.done = outcome_ != Outcome::running;
  result.outcome = outcome_;
  return result;
}

Observation Lander::observation() const {
  Observation o;
  o[0] = clip(state_.x / 10.0, -2.0, 2.0);
  o[1] = clip(state_.y / 10.0, -2.0, 2.0);
  o[2] = clip(state_.vx / 5.0, -2.0, 2.0);
  o[3] = clip(state_.vy / 5.0, -2.0, 2.0);
  o[4] = state_.theta;
  o[5] = clip(state_.omega / 2.0, -2.0, 2.0);
  o[6] = state_.leg_left ? 1.0 : 0.0;
  o[7] = state_.leg_right ? 1.0 : 0.0;
  return o;
}

double Lander::shaping() const { return potential(config_, state_); }

bool is_solved(double mean_reward_100) { return mean_reward_100 >= 200.0; }

void write_trajectory_header(std::ostream& out) {
  out << "step,x,y,vx,vy,theta,omega,legL,legR,action,reward,done\n";
}

void write_trajectory_row(std::ostream& out, int step, const EnvState& s,
                          int action, double reward, bool done) {
  out << step << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
      << format_double(s.vx) << ',' << format_double(s.vy) << ','
      << format_double(s.theta) << ',' << format_double(s.omega) << ','
      << (s.leg_left ? 1 : 0) << ',' << (s.leg_right ? 1 : 0) << ',' << action
      << ',' << format_double(reward) << ',' << (done ? 1 : 0) << '\n';
}

}  // namespace landrl::env
