#pragma once

// Quaternion algebra, Euler conversion and the unit conversions shared by the
// fusion and dead-reckoning code.
//
// Quaternions are stored scalar-first: (w, x, y, z).  A unit quaternion q maps
// sensor-frame vectors to the world frame: v_world = q (x) v_sensor (x) q*.
// Euler angles use the intrinsic Z-Y-X (yaw, pitch, roll) convention.

#include <stdexcept>
#include <string>
#include <string_view>

namespace airloc {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2 per g
inline constexpr double kPi = 3.14159265358979323846;

class GeoError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Unit {
  kDimensionless,
  kG,
  kMetersPerSecond2,
  kDegPerSecond,
  kRadPerSecond,
  kTesla,
  kMeters,
};

std::string_view to_string(Unit unit);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  Unit unit = Unit::kDimensionless;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_, Unit u = Unit::kDimensionless)
      : x(x_), y(y_), z(z_), unit(u) {}

  double norm() const;
  double norm_squared() const { return x * x + y * y + z * z; }
  // Same direction, unit length; throws GeoError on the zero vector.
  Vec3 normalized() const;
  Vec3 with_unit(Unit u) const { return {x, y, z, u}; }

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// Component-wise arithmetic keeps the unit tag; mixing tags throws GeoError.
Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& v);
Vec3 operator*(const Vec3& v, double s);
double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
  // Rotation of `angle` radians about the (normalized) axis.
  static Quaternion from_axis_angle(const Vec3& axis, double angle);

  double norm() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  // Throws GeoError for the zero quaternion.
  Quaternion normalized() const;
  bool is_unit(double tol = 1e-6) const;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b);  // Hamilton product
Quaternion operator+(const Quaternion& a, const Quaternion& b);
Quaternion operator*(double s, const Quaternion& q);

inline Quaternion quat_multiply(const Quaternion& a, const Quaternion& b) { return a * b; }

// q (x) (0, v) (x) q*.  Requires |q| = 1 within 1e-6.
Vec3 rotate_vector(const Quaternion& q, const Vec3& v);
// q* (x) (0, v) (x) q, i.e. world -> sensor for a sensor -> world q.
Vec3 rotate_vector_inverse(const Quaternion& q, const Vec3& v);

struct EulerAngles {
  double yaw = 0.0;    // about z, (-pi, pi]
  double pitch = 0.0;  // about y, [-pi/2, pi/2]
  double roll = 0.0;   // about x, (-pi, pi]
};

// Intrinsic Z-Y-X.  At |pitch| = pi/2 the roll is pinned to 0 and the whole
// rotation about the vertical is reported as yaw.
EulerAngles quat_to_euler(const Quaternion& q);
Quaternion euler_to_quat(const EulerAngles& e);

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

// g -> m/s^2 and deg/s -> rad/s; both reject a vector with the wrong tag.
Vec3 g_to_ms2(const Vec3& a);
Vec3 deg_to_rad(const Vec3& w);

}  // namespace airloc
