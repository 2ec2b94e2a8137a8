#include "airloc/geo_math.hpp"

#include <cmath>

namespace airloc {

namespace {

void require_same_unit(const Vec3& a, const Vec3& b) {
  if (a.unit != b.unit) {
    throw GeoError("unit mismatch: " + std::string(to_string(a.unit)) + " vs " +
                   std::string(to_string(b.unit)));
  }
}

void require_unit_quaternion(const Quaternion& q) {
  if (!q.is_unit(1e-6)) throw GeoError("quaternion is not unit length");
}

}  // namespace

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::kDimensionless: return "1";
    case Unit::kG: return "g";
    case Unit::kMetersPerSecond2: return "m/s^2";
    case Unit::kDegPerSecond: return "deg/s";
    case Unit::kRadPerSecond: return "rad/s";
    case Unit::kTesla: return "T";
    case Unit::kMeters: return "m";
  }
  return "?";
}

double Vec3::norm() const { return std::sqrt(norm_squared()); }

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n == 0.0) throw GeoError("cannot normalize the zero vector");
  return {x / n, y / n, z / n, unit};
}

Vec3 operator+(const Vec3& a, const Vec3& b) {
  require_same_unit(a, b);
  return {a.x + b.x, a.y + b.y, a.z + b.z, a.unit};
}

Vec3 operator-(const Vec3& a, const Vec3& b) {
  require_same_unit(a, b);
  return {a.x - b.x, a.y - b.y, a.z - b.z, a.unit};
}

Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z, v.unit}; }
Vec3 operator*(const Vec3& v, double s) { return s * v; }

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 n = axis.normalized();
  const double s = std::sin(angle / 2.0);
  return {std::cos(angle / 2.0), n.x * s, n.y * s, n.z * s};
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (n == 0.0) throw GeoError("cannot normalize the zero quaternion");
  return {w / n, x / n, y / n, z / n};
}

bool Quaternion::is_unit(double tol) const { return std::abs(norm() - 1.0) <= tol; }

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
  };
}

Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

Quaternion operator*(double s, const Quaternion& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }

Vec3 rotate_vector(const Quaternion& q, const Vec3& v) {
  require_unit_quaternion(q);
  const Quaternion r = q * Quaternion{0.0, v.x, v.y, v.z} * q.conjugate();
  return {r.x, r.y, r.z, v.unit};
}

Vec3 rotate_vector_inverse(const Quaternion& q, const Vec3& v) {
  return rotate_vector(q.conjugate(), v);
}

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

EulerAngles quat_to_euler(const Quaternion& q) {
  require_unit_quaternion(q);
  const double sinp = 2.0 * (q.w * q.y - q.z * q.x);
  EulerAngles e;
  if (std::abs(sinp) >= 1.0 - 1e-12) {
    e.pitch = std::copysign(kPi / 2.0, sinp);
    e.roll = 0.0;
    e.yaw = wrap_angle(2.0 * std::atan2(q.z, q.w));
    return e;
  }
  e.pitch = std::asin(sinp);
  e.roll = wrap_angle(std::atan2(2.0 * (q.w * q.x + q.y * q.z), 1.0 - 2.0 * (q.x * q.x + q.y * q.y)));
  e.yaw = wrap_angle(std::atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z)));
  return e;
}

Quaternion euler_to_quat(const EulerAngles& e) {
  const double cy = std::cos(e.yaw / 2.0), sy = std::sin(e.yaw / 2.0);
  const double cp = std::cos(e.pitch / 2.0), sp = std::sin(e.pitch / 2.0);
  const double cr = std::cos(e.roll / 2.0), sr = std::sin(e.roll / 2.0);
  return {
      cr * cp * cy + sr * sp * sy,
      sr * cp * cy - cr * sp * sy,
      cr * sp * cy + sr * cp * sy,
      cr * cp * sy - sr * sp * cy,
  };
}

double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

Vec3 g_to_ms2(const Vec3& a) {
  if (a.unit != Unit::kG) throw GeoError("g_to_ms2 expects a vector in g, got " + std::string(to_string(a.unit)));
  return {a.x * kStandardGravity, a.y * kStandardGravity, a.z * kStandardGravity, Unit::kMetersPerSecond2};
}

Vec3 deg_to_rad(const Vec3& w) {
  if (w.unit != Unit::kDegPerSecond) {
    throw GeoError("deg_to_rad expects a vector in deg/s, got " + std::string(to_string(w.unit)));
  }
  return {deg_to_rad(w.x), deg_to_rad(w.y), deg_to_rad(w.z), Unit::kRadPerSecond};
}

}  // namespace airloc
