#pragma once

// Raw 9-DoF samples in device units and the shared trace CSV format:
//
//   t,ax,ay,az,gx,gy,gz,mx,my,mz
//
// seconds, g, deg/s and microtesla, '.' decimal point, ',' separator, LF
// line endings.  In memory the magnetometer is held in tesla.
//
// Device resolution (the grid the CSV writer and the telemetry payload use):
// 1 us, 1e-6 g, 1e-4 deg/s, 1e-3 uT.  Values already on the grid survive a
// write/read cycle or a trip through the encrypted link bit-for-bit because
// every path rebuilds them with the same division (see device_grid).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "airloc/geo_math.hpp"

namespace airloc {

struct ImuSample {
  double t = 0.0;  // seconds
  Vec3 accel{0.0, 0.0, 0.0, Unit::kG};
  Vec3 gyro{0.0, 0.0, 0.0, Unit::kDegPerSecond};
  Vec3 mag{0.0, 0.0, 0.0, Unit::kTesla};

  friend bool operator==(const ImuSample&, const ImuSample&) = default;
};

using ImuTrace = std::vector<ImuSample>;

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws TraceError unless timestamps strictly increase and every component
// is finite.  An empty trace is accepted here.
void validate_trace(const ImuTrace& trace);

// Bitwise equality of every field, including signed zeros.
bool bitwise_equal(const ImuTrace& a, const ImuTrace& b);

namespace device_grid {

inline constexpr double kTimeTicksPerSecond = 1e6;
inline constexpr double kAccelTicksPerG = 1e6;
inline constexpr double kGyroTicksPerDps = 1e4;
inline constexpr double kMagTicksPerMicrotesla = 1e3;

// Quantization.  Throws TraceError when a value does not fit the target width.
std::int64_t time_ticks(double seconds);
std::int32_t accel_ticks(double g);
std::int32_t gyro_ticks(double dps);
std::int32_t mag_ticks(double tesla);

double time_from_ticks(std::int64_t ticks);
double accel_from_ticks(std::int32_t ticks);
double gyro_from_ticks(std::int32_t ticks);
double mag_from_ticks(std::int32_t ticks);  // tesla

// Snaps every field of the sample onto the device grid.
ImuSample quantize(const ImuSample& s);

}  // namespace device_grid

ImuTrace read_trace_csv(std::istream& in);
ImuTrace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(std::ostream& out, const ImuTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const ImuTrace& trace);

// Exact decimal rendering of ticks / 10^decimals with every digit kept,
// e.g. (-1500, 3) -> "-1.500".
std::string format_fixed(std::int64_t ticks, int decimals);

}  // namespace airloc
