#include <algorithm>
#include <cmath>
#include <string>

#include "airloc/fusion.hpp"

namespace airloc {

namespace {

constexpr double kMinMagTesla = 1e-12;

void check_gain(double g, const char* name) {
  if (!std::isfinite(g) || g < 0.0) throw FilterError(std::string(name) + " must be finite and non-negative");
}

FilterGains default_gains(FilterKind kind) {
  switch (kind) {
    case FilterKind::kMadgwick: return MadgwickGains{};
    case FilterKind::kMahony: return MahonyGains{};
    case FilterKind::kComplementaryKalman: return KalmanGains{};
  }
  throw FilterError("unknown filter kind");
}

bool gains_match(FilterKind kind, const FilterGains& g) {
  switch (kind) {
    case FilterKind::kMadgwick: return std::holds_alternative<MadgwickGains>(g);
    case FilterKind::kMahony: return std::holds_alternative<MahonyGains>(g);
    case FilterKind::kComplementaryKalman: return std::holds_alternative<KalmanGains>(g);
  }
  return false;
}

// Reference flux in the world frame, (|h_xy|, 0, h_z) with h = q m q*.
Vec3 reference_flux(const Quaternion& q, const Vec3& m) {
  const Vec3 h = rotate_vector(q, m);
  return {std::hypot(h.x, h.y), 0.0, h.z};
}

FilterState update_madgwick(FilterState s, const Vec3& gyro, const Vec3& a, const Vec3& m, bool use_accel,
                            bool use_mag, double dt) {
  const double beta = std::get<MadgwickGains>(s.gains).beta;
  const Quaternion& q = s.q;
  Quaternion q_dot = 0.5 * (q * Quaternion{0.0, gyro.x, gyro.y, gyro.z});
  if (use_accel && beta > 0.0) {
    const Vec3 b = use_mag ? reference_flux(q, m) : Vec3{};
    const Quaternion grad = detail::madgwick_gradient(q, a, m, b, use_mag);
    const double n = grad.norm();
    if (n > 0.0) q_dot = q_dot + (-beta / n) * grad;
  }
  s.q = (q + dt * q_dot).normalized();
  return s;
}

FilterState update_mahony(FilterState s, const Vec3& gyro, const Vec3& a, const Vec3& m, bool use_accel,
                          bool use_mag, double dt) {
  const auto& g = std::get<MahonyGains>(s.gains);
  Vec3 omega = gyro.with_unit(Unit::kRadPerSecond);
  if (use_accel) {
    // Estimated gravity and flux directions in the sensor frame.
    const Vec3 v = rotate_vector_inverse(s.q, {0.0, 0.0, 1.0});
    Vec3 e = cross(a, v);
    if (use_mag) {
      const Vec3 w = rotate_vector_inverse(s.q, reference_flux(s.q, m));
      e = e + cross(m, w);
    }
    e = e.with_unit(Unit::kRadPerSecond);
    if (g.ki > 0.0) s.integral_error = s.integral_error + (g.ki * dt) * e;
    omega = omega + g.kp * e + s.integral_error;
  }
  s.q = integrate_gyro(s.q, omega, dt);
  return s;
}

FilterState update_kalman(FilterState s, const Vec3& gyro, const Vec3& a, const Vec3& m, bool use_accel,
                          bool use_mag, double dt) {
  const auto& g = std::get<KalmanGains>(s.gains);
  const Quaternion predicted = integrate_gyro(s.q, gyro, dt);
  for (double& p : s.variance) p += g.process_variance * dt;
  s.q = predicted;
  if (!use_accel) return s;

  const auto gain = [&](double p) { return p > 0.0 ? p / (p + g.measurement_variance) : 0.0; };
  const double k_yaw = use_mag ? gain(s.variance[0]) : 0.0;
  const double k_pitch = gain(s.variance[1]);
  const double k_roll = gain(s.variance[2]);
  if (k_yaw == 0.0 && k_pitch == 0.0 && k_roll == 0.0) return s;

  EulerAngles e = quat_to_euler(predicted);
  const double roll_meas = std::atan2(a.y, a.z);
  const double pitch_meas = std::atan2(-a.x, std::hypot(a.y, a.z));
  e.roll = wrap_angle(e.roll + k_roll * wrap_angle(roll_meas - e.roll));
  e.pitch = std::clamp(e.pitch + k_pitch * (pitch_meas - e.pitch), -kPi / 2.0, kPi / 2.0);
  s.variance[1] *= 1.0 - k_pitch;
  s.variance[2] *= 1.0 - k_roll;
  if (use_mag) {
    // Heading from the magnetometer de-rotated by the corrected tilt.
    const Vec3 level = rotate_vector(euler_to_quat({0.0, e.pitch, e.roll}), m);
    const double yaw_meas = std::atan2(-level.y, level.x);
    e.yaw = wrap_angle(e.yaw + k_yaw * wrap_angle(yaw_meas - e.yaw));
    s.variance[0] *= 1.0 - k_yaw;
  }
  s.q = euler_to_quat(e).normalized();
  return s;
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::kMadgwick: return "madgwick";
    case FilterKind::kMahony: return "mahony";
    case FilterKind::kComplementaryKalman: return "kalman";
  }
  return "?";
}

FilterKind parse_filter_kind(std::string_view name) {
  for (FilterKind k : kAllFilterKinds) {
    if (to_string(k) == name) return k;
  }
  throw FilterError("unknown filter '" + std::string(name) + "' (expected madgwick, mahony or kalman)");
}

FilterState filter_init(FilterKind kind, std::optional<FilterGains> gains) {
  FilterState s;
  s.kind = kind;
  s.gains = gains ? *gains : default_gains(kind);
  if (!gains_match(kind, s.gains)) throw FilterError("gains do not match filter kind");
  std::visit(
      [](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, MadgwickGains>) {
          check_gain(g.beta, "beta");
        } else if constexpr (std::is_same_v<G, MahonyGains>) {
          check_gain(g.kp, "Kp");
          check_gain(g.ki, "Ki");
        } else {
          check_gain(g.process_variance, "process variance");
          check_gain(g.measurement_variance, "measurement variance");
          check_gain(g.initial_variance, "initial variance");
        }
      },
      s.gains);
  if (const auto* k = std::get_if<KalmanGains>(&s.gains)) s.variance.fill(k->initial_variance);
  return s;
}

Quaternion integrate_gyro(const Quaternion& q, const Vec3& gyro, double dt) {
  const Quaternion q_dot = 0.5 * (q * Quaternion{0.0, gyro.x, gyro.y, gyro.z});
  return (q + dt * q_dot).normalized();
}

FilterState filter_update(const FilterState& s, const Vec3& gyro, const Vec3& accel, const Vec3& mag, double dt) {
  if (!(dt > 0.0)) throw FilterError("dt must be positive");
  if (gyro.unit != Unit::kRadPerSecond) throw FilterError("gyro must be in rad/s");
  if (accel.unit != Unit::kMetersPerSecond2 && accel.unit != Unit::kG) throw FilterError("accel must be in m/s^2 or g");
  if (mag.unit != Unit::kTesla) throw FilterError("mag must be in tesla");

  const bool use_accel = accel.norm_squared() > 0.0;
  const bool use_mag = use_accel && mag.norm() >= kMinMagTesla;
  const Vec3 a = use_accel ? accel.normalized().with_unit(Unit::kDimensionless) : Vec3{};
  const Vec3 m = use_mag ? mag.normalized().with_unit(Unit::kDimensionless) : Vec3{};

  switch (s.kind) {
    case FilterKind::kMadgwick: return update_madgwick(s, gyro, a, m, use_accel, use_mag, dt);
    case FilterKind::kMahony: return update_mahony(s, gyro, a, m, use_accel, use_mag, dt);
    case FilterKind::kComplementaryKalman: return update_kalman(s, gyro, a, m, use_accel, use_mag, dt);
  }
  throw FilterError("unknown filter kind");
}

namespace detail {

Quaternion madgwick_gradient(const Quaternion& q, const Vec3& a, const Vec3& m, const Vec3& b, bool use_mag) {
  const double q0 = q.w, q1 = q.x, q2 = q.y, q3 = q.z;

  // Gravity objective and Jacobian.
  const std::array<double, 3> fg{
      2.0 * (q1 * q3 - q0 * q2) - a.x,
      2.0 * (q0 * q1 + q2 * q3) - a.y,
      2.0 * (0.5 - q1 * q1 - q2 * q2) - a.z,
  };
  const double jg[3][4] = {
      {-2.0 * q2, 2.0 * q3, -2.0 * q0, 2.0 * q1},
      {2.0 * q1, 2.0 * q0, 2.0 * q3, 2.0 * q2},
      {0.0, -4.0 * q1, -4.0 * q2, 0.0},
  };
  std::array<double, 4> grad{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) grad[c] += jg[r][c] * fg[r];
  }

  if (use_mag) {
    const double bx = b.x, bz = b.z;
    const std::array<double, 3> fb{
        2.0 * bx * (0.5 - q2 * q2 - q3 * q3) + 2.0 * bz * (q1 * q3 - q0 * q2) - m.x,
        2.0 * bx * (q1 * q2 - q0 * q3) + 2.0 * bz * (q0 * q1 + q2 * q3) - m.y,
        2.0 * bx * (q0 * q2 + q1 * q3) + 2.0 * bz * (0.5 - q1 * q1 - q2 * q2) - m.z,
    };
    const double jb[3][4] = {
        {-2.0 * bz * q2, 2.0 * bz * q3, -4.0 * bx * q2 - 2.0 * bz * q0, -4.0 * bx * q3 + 2.0 * bz * q1},
        {-2.0 * bx * q3 + 2.0 * bz * q1, 2.0 * bx * q2 + 2.0 * bz * q0, 2.0 * bx * q1 + 2.0 * bz * q3,
         -2.0 * bx * q0 + 2.0 * bz * q2},
        {2.0 * bx * q2, 2.0 * bx * q3 - 4.0 * bz * q1, 2.0 * bx * q0 - 4.0 * bz * q2, 2.0 * bx * q1},
    };
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) grad[c] += jb[r][c] * fb[r];
    }
  }
  return {grad[0], grad[1], grad[2], grad[3]};
}

}  // namespace detail

}  // namespace airloc
