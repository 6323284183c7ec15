#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>

namespace landrl::env {

// Normalized 8-component view of the state:
// [x/10, y/10, vx/5, vy/5, theta, omega/2, leg_left, leg_right].
// The five scaled components are clipped to [-2, 2]; legs are 0 or 1.
using Observation = Eigen::Matrix<double, 8, 1>;

enum class Outcome { running, landed, crashed, out_of_bounds, timeout };

std::string_view to_string(Outcome o);

// Physics, initial-condition, termination, and reward constants. Defaults
// make the task winnable (main thrust beats gravity) and score a clean
// descent from the spawn height at roughly +200 total.
struct EnvConfig {
  double dt = 0.02;
  double gravity = 10.0;
  double main_accel = 13.0;   // along body-up while action 2 is held
  double side_torque = 0.4;   // rad/s^2 from a side thruster
  double side_accel = 0.6;    // lateral kick opposite the fired side

  // reset() draws uniformly from these ranges; y is fixed.
  double init_x_range = 0.2;
  double init_y = 10.0;
  double init_vx_range = 0.5;
  double init_vy_min = -1.0;
  double init_vy_max = 0.0;
  double init_theta_range = 0.1;
  double init_omega_range = 0.1;

  double leg_x = 0.35;   // foot offsets in the body frame
  double leg_y = -0.25;

  double pad_half_width = 1.0;  // pad centered at x = 0; informational only

  double crash_speed = 2.0;   // |vy| limit while touching down
  double crash_angle = 0.5;   // |theta| limit while touching down
  double land_speed = 0.1;    // |vx| and |vy| bound for a settled landing
  double land_omega = 0.1;
  double bounds_x = 10.0;     // |x| beyond this ends the episode
  int max_steps = 1000;

  double main_engine_cost = 0.03;
  double side_engine_cost = 0.003;
  double leg_contact_bonus = 10.0;  // per leg, via the shaping potential
  double crash_penalty = 100.0;
  double land_bonus = 100.0;
  double shaping_position = 10.0;
  double shaping_velocity = 10.0;
  double shaping_angle = 100.0;

  void validate() const;  // throws ConfigError

  bool operator==(const EnvConfig&) const = default;
};

// Full physical state. Leg flags always mirror the geometry: a flag is set
// iff that foot's world height is <= 0.
struct EnvState {
  double x = 0, y = 0;
  double vx = 0, vy = 0;
  double theta = 0;
  double omega = 0;
  bool leg_left = false;
  bool leg_right = false;
  int step_count = 0;
  std::optional<double> prev_shaping;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::running;
};

// Deterministic 2D lander. Same seed and action sequence reproduce the
// trajectory bit for bit; step() itself draws no randomness.
class Lander {
 public:
  explicit Lander(EnvConfig config = {});

  // Draws the initial state from the configured ranges. Must be called
  // before step().
  Observation reset(std::uint64_t seed);

  // One control frame: semi-implicit Euler over dt, then contact,
  // termination, and reward. Throws StateError on a finished episode and
  // std::invalid_argument for actions outside [0, 3].
  StepResult step(int action);

  bool done() const { return outcome_ != Outcome::running; }
  Outcome outcome() const { return outcome_; }
  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }

  Observation observation() const;
  // Potential used for reward differences; exposed for analysis.
  double shaping() const;

 private:
  EnvConfig config_;
  EnvState state_;
  Outcome outcome_ = Outcome::running;
  bool active_ = false;

  void refresh_leg_contacts();
};

// 100-episode mean at or above 200 counts as solved.
bool is_solved(double mean_reward_100);

// Debug trajectory dump:
// step,x,y,vx,vy,theta,omega,legL,legR,action,reward,done
void write_trajectory_header(std::ostream& out);
void write_trajectory_row(std::ostream& out, int step, const EnvState& s,
                          int action, double reward, bool done);

}  // namespace landrl::env
