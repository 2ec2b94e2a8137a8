#pragma once

// Synthetic ground truth for the filters and the dead-reckoning pipeline.
//
// The simulated foot sensor stays level; its yaw follows the walking
// direction.  Each step is a half-sine bump on the vertical accelerometer
// axis centred on the true step time.  Samples are snapped to the device
// grid so a trace survives CSV and link round trips bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "airloc/geo_math.hpp"
#include "airloc/imu.hpp"
#include "airloc/pdr.hpp"

namespace airloc {

class SimError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrueStep {
  double heading = 0.0;  // radians, bearing of the segment
  Position2 end;         // position after the step
};

struct GroundTruthWalk {
  std::vector<Position2> waypoints;
  double stride = 0.0;   // meters
  double cadence = 0.0;  // steps per second
  std::vector<TrueStep> steps;
  double path_length = 0.0;  // sum of segment lengths
  double dropped = 0.0;      // per-segment partial strides not walked

  double walked_distance() const { return static_cast<double>(steps.size()) * stride; }
};

// Whole strides along each segment in turn; the partial stride left at the
// end of a segment is dropped and added to `dropped`.  The next segment
// starts from the last step position.
GroundTruthWalk generate_walk(const std::vector<Position2>& waypoints, double stride, double cadence);

struct SensorModel {
  double sample_rate = 100.0;    // Hz
  double accel_noise_std = 0.0;  // g
  double gyro_noise_std = 0.0;   // deg/s
  double gyro_bias = 0.0;        // deg/s, added on every axis
  double mag_noise_std = 0.0;    // tesla
  std::uint64_t seed = 1;

  double step_amplitude = 0.6;  // g above gravity
  double step_width = 0.2;      // s
  double lead_in = 1.0;         // s of standing still before the first step
  double lead_out = 1.0;        // s after the last step
  double initial_yaw = 0.0;     // rad; the sensor turns to the first heading before walking
  Vec3 world_field{2.0e-5, 0.0, -4.0e-5, Unit::kTesla};  // x north, z up: the field dips downward
};

struct SyntheticTrace {
  ImuTrace trace;
  std::vector<Quaternion> orientation;  // true sensor -> world, one per sample
  std::vector<Position2> position;      // true foot position, one per sample
  std::vector<double> step_times;       // true step (bump centre) times
};

SyntheticTrace synthesize_imu(const GroundTruthWalk& walk, const SensorModel& model);

// Ground-truth CSV: t,qw,qx,qy,qz,x,y
void write_truth_csv(std::ostream& out, const SyntheticTrace& sim);
void write_truth_csv(const std::filesystem::path& path, const SyntheticTrace& sim);

struct TruthRow {
  double t = 0.0;
  Quaternion q;
  Position2 pos;
};
std::vector<TruthRow> read_truth_csv(std::istream& in);
std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path);

}  // namespace airloc
