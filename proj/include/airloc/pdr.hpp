#pragma once

// Pedestrian dead reckoning: QR anchor, step detection, stride length and
// per-step position updates on a single floor.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "airloc/fusion.hpp"
#include "airloc/imu.hpp"

namespace airloc {

class PdrError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Sex { kMale, kFemale };

// Accepts "m"/"male" and "f"/"female".
Sex parse_sex(std::string_view text);

struct UserProfile {
  double height_cm = 0.0;
  Sex sex = Sex::kMale;
};

// Height-proportional stride constant: 0.415 for men, 0.413 for women.
double stride_constant(Sex sex);

// l = h * k, in centimeters.  Throws PdrError unless height is positive and finite.
double step_length_cm(const UserProfile& profile);

struct Anchor {
  std::int64_t building = 0;
  std::int64_t floor = 0;
  double x = 0.0;  // meters, floor frame
  double y = 0.0;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

// QR payload: AIRLOC;v=1;b=<int>;f=<int>;x=<decimal>;y=<decimal>
class QrParseError : public std::invalid_argument {
 public:
  enum class Kind { kBadPrefix, kMalformed, kUnknownField, kDuplicateField, kMissingField, kUnknownVersion, kNonNumeric };

  QrParseError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

Anchor parse_qr_payload(std::string_view text);
// Canonical form: fields in v,b,f,x,y order; x and y in the shortest plain
// decimal that reads back exactly ("0", "10.5").
std::string encode_qr_payload(const Anchor& anchor);

struct StepDetectorConfig {
  double threshold_g = 1.2;
  double refractory_s = 0.3;
};

// Indices of accepted peaks: samples above the threshold that are local maxima
// (strictly above the previous sample, not below the next) and at least
// `refractory_s` after the previously accepted peak.  Throws PdrError when
// timestamps are not strictly increasing.
std::vector<std::size_t> detect_step_indices(std::span<const double> t, std::span<const double> accel_norm_g,
                                             const StepDetectorConfig& cfg = {});
std::vector<double> detect_steps(std::span<const double> t, std::span<const double> accel_norm_g,
                                 const StepDetectorConfig& cfg = {});

struct Position2 {
  double x = 0.0;
  double y = 0.0;
};

// x + length cos(yaw), y + length sin(yaw).
Position2 advance_position(Position2 pos, double yaw, double length_m);

struct StepEvent {
  double t = 0.0;
  double heading = 0.0;  // radians, filter yaw at the peak sample
  double length = 0.0;   // meters
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::int64_t floor = 0;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // points[0] is the anchor pose
  std::vector<StepEvent> steps;
  double stride_m = 0.0;  // every step uses the same length

  // steps x stride.
  double travelled_distance() const;
};

struct PdrConfig {
  StepDetectorConfig detector;
  std::optional<FilterGains> gains;
};

// unit conversion -> attitude filter -> step detection on |a| -> one position
// advance per step, starting at the anchor (at the first sample time).  The
// map x axis is taken to be magnetic north.
Trajectory run_pdr(const ImuTrace& trace, const UserProfile& profile, const Anchor& anchor, FilterKind kind,
                   const PdrConfig& cfg = {});

// Header t,x,y,floor.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);
std::vector<TrajectoryPoint> read_trajectory_csv(std::istream& in);

}  // namespace airloc
