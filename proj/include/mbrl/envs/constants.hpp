#pragma once

namespace mbrl {

// Physics constants for every analytic environment, in one place. Any field
// can be overridden through the env params map (see make_env).

struct PendulumConstants {
  double g = 10.0;
  double m = 1.0;
  double l = 1.0;
  double dt = 0.05;
  double max_torque = 2.0;
  double max_speed = 8.0;
  double init_th_range = 3.14159265358979323846;
  double init_thdot_range = 1.0;
};

struct CartpoleConstants {
  double gravity = 9.8;
  double masscart = 1.0;
  double masspole = 0.1;
  double length = 0.5;  // half the pole length
  double force_mag = 10.0;
  double dt = 0.02;
  bool discrete = false;  // map action to sign(a) * 1 before scaling
  // Initial-state half-widths (uniform, symmetric around zero).
  double init_x = 0.05;
  double init_xdot = 0.05;
  double init_theta = 0.05;
  double init_thetadot = 0.05;
  // Early-termination thresholds; only enforced by the _et variant.
  double theta_threshold = 0.4;
  double x_threshold = 2.4;
};

struct AcrobotConstants {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double lc1 = 0.5;
  double lc2 = 0.5;
  double i1 = 1.0;
  double i2 = 1.0;
  double g = 9.8;
  double dt = 0.2;
  double max_vel1 = 12.566370614359172;  // 4 pi
  double max_vel2 = 28.274333882308138;  // 9 pi
  double max_torque = 1.0;
  double init_range = 0.1;
};

struct MountaincarConstants {
  double power = 0.0015;
  double gravity_scale = 0.0025;
  double min_position = -1.2;
  double max_position = 0.6;
  double max_speed = 0.07;
  double init_low = -0.6;
  double init_high = -0.4;
};

struct Reacher2dConstants {
  double l1 = 0.1;
  double l2 = 0.11;
  double dt = 0.02;
  double torque_scale = 20.0;
  double damping = 2.0;
  double max_torque = 1.0;
  double target_radius = 0.18;
  double init_angle = 0.1;
  double init_vel = 0.005;
};

}  // namespace mbrl
