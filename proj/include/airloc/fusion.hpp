#pragma once

// Attitude filters turning 9-DoF samples into a quaternion stream.
//
// Frame convention: world z up, x toward magnetic north.  A level, upright
// sensor reads +1 g on its z axis.  The filter quaternion maps sensor-frame
// vectors into the world frame, so yaw 0 means the sensor x axis points north.

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "airloc/geo_math.hpp"
#include "airloc/imu.hpp"

namespace airloc {

enum class FilterKind { kMadgwick, kMahony, kComplementaryKalman };

inline constexpr std::array<FilterKind, 3> kAllFilterKinds{FilterKind::kMadgwick, FilterKind::kMahony,
                                                           FilterKind::kComplementaryKalman};

std::string_view to_string(FilterKind kind);
// Accepts "madgwick", "mahony", "kalman".
FilterKind parse_filter_kind(std::string_view name);

class FilterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MadgwickGains {
  double beta = 0.1;  // gradient step, rad/s
};

struct MahonyGains {
  double kp = 1.0;
  double ki = 0.01;
};

// Per-axis scalar Kalman on yaw/pitch/roll.  Variances in rad^2 (process per
// second).  With process and initial variance both zero the gain stays zero
// and the filter reduces to gyro integration.
struct KalmanGains {
  double process_variance = 1e-3;
  double measurement_variance = 0.1;
  double initial_variance = 1.0;
};

using FilterGains = std::variant<MadgwickGains, MahonyGains, KalmanGains>;

struct FilterState {
  FilterKind kind = FilterKind::kMadgwick;
  Quaternion q = Quaternion::identity();
  FilterGains gains = MadgwickGains{};
  Vec3 integral_error{0.0, 0.0, 0.0, Unit::kRadPerSecond};  // Mahony only
  std::array<double, 3> variance{0.0, 0.0, 0.0};            // Kalman only: yaw, pitch, roll
};

// Gains must be finite and non-negative and must match `kind`.  Zero gains
// are allowed and switch the correction off.
FilterState filter_init(FilterKind kind, std::optional<FilterGains> gains = std::nullopt);

// One filter step.  gyro in rad/s, accel in m/s^2 (g is accepted too; only
// its direction is used), mag in tesla.  A zero accel vector skips the
// correction; a magnetometer norm below 1e-12 T drops to a 6-DoF update.
// Throws FilterError when dt <= 0.
FilterState filter_update(const FilterState& s, const Vec3& gyro, const Vec3& accel, const Vec3& mag, double dt);

// First-order quaternion integration of a body rate, renormalized:
// q + 0.5 q (x) (0, w) dt.
Quaternion integrate_gyro(const Quaternion& q, const Vec3& gyro, double dt);

struct OrientationSample {
  double t = 0.0;
  Quaternion q;
  EulerAngles euler;
};

// Runs one filter over a trace in device units (converted internally).  The
// first sample is integrated over the first sample interval (0.01 s for a
// single-sample trace).
std::vector<OrientationSample> run_filter(FilterKind kind, const ImuTrace& trace,
                                          std::optional<FilterGains> gains = std::nullopt);

struct AxisRms {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
};

struct FilterComparison {
  std::vector<double> t;
  // Indexed like kAllFilterKinds.
  std::array<std::vector<EulerAngles>, 3> euler;
  std::optional<std::array<AxisRms, 3>> rms;
};

// Runs all three filters.  When `truth` is given it must have one orientation
// per sample and RMS errors are filled in.
FilterComparison compare_filters(const ImuTrace& trace, const std::vector<Quaternion>* truth = nullptr);

// Per-sample CSV: t, then yaw/pitch/roll (degrees) suffixed _madgwick,
// _mahony, _kalman.
void write_comparison_csv(std::ostream& out, const FilterComparison& cmp);

// RMS of wrapped angle differences, in degrees.
AxisRms rms_error(const std::vector<EulerAngles>& estimate, const std::vector<Quaternion>& truth);

namespace detail {

// J^T f for the Madgwick objective.  `a` and `m` are unit vectors in the
// sensor frame, `b` the world reference flux (bx, 0, bz).  When use_mag is
// false only the gravity term is used.
Quaternion madgwick_gradient(const Quaternion& q, const Vec3& a, const Vec3& m, const Vec3& b, bool use_mag);

}  // namespace detail

}  // namespace airloc
