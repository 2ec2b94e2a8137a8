#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "airloc/imu.hpp"

namespace airloc {

namespace {

constexpr std::string_view kHeader = "t,ax,ay,az,gx,gy,gz,mx,my,mz";

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

std::uint64_t bits(double d) {
  std::uint64_t b;
  std::memcpy(&b, &d, sizeof b);
  return b;
}

bool same_bits(const Vec3& a, const Vec3& b) {
  return bits(a.x) == bits(b.x) && bits(a.y) == bits(b.y) && bits(a.z) == bits(b.z) && a.unit == b.unit;
}

template <typename Int>
Int checked_round(double v, double ticks_per_unit, const char* what) {
  const double scaled = v * ticks_per_unit;
  if (!std::isfinite(scaled) || scaled > static_cast<double>(std::numeric_limits<Int>::max()) ||
      scaled < static_cast<double>(std::numeric_limits<Int>::min())) {
    throw TraceError(std::string(what) + " value out of device range");
  }
  return static_cast<Int>(std::llround(scaled));
}

double parse_field(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v, std::chars_format::general);
  if (res.ec != std::errc{} || res.ptr != last || text.empty()) {
    throw TraceError("line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void validate_trace(const ImuTrace& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const ImuSample& s = trace[i];
    if (!std::isfinite(s.t) || !finite(s.accel) || !finite(s.gyro) || !finite(s.mag)) {
      throw TraceError("sample " + std::to_string(i) + " has a non-finite component");
    }
    if (i > 0 && !(s.t > trace[i - 1].t)) {
      throw TraceError("timestamps not strictly increasing at sample " + std::to_string(i));
    }
  }
}

bool bitwise_equal(const ImuTrace& a, const ImuTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (bits(a[i].t) != bits(b[i].t) || !same_bits(a[i].accel, b[i].accel) || !same_bits(a[i].gyro, b[i].gyro) ||
        !same_bits(a[i].mag, b[i].mag)) {
      return false;
    }
  }
  return true;
}

namespace device_grid {

std::int64_t time_ticks(double seconds) { return checked_round<std::int64_t>(seconds, kTimeTicksPerSecond, "time"); }
std::int32_t accel_ticks(double g) { return checked_round<std::int32_t>(g, kAccelTicksPerG, "accelerometer"); }
std::int32_t gyro_ticks(double dps) { return checked_round<std::int32_t>(dps, kGyroTicksPerDps, "gyroscope"); }
std::int32_t mag_ticks(double tesla) {
  return checked_round<std::int32_t>(tesla, 1e6 * kMagTicksPerMicrotesla, "magnetometer");
}

double time_from_ticks(std::int64_t ticks) { return static_cast<double>(ticks) / kTimeTicksPerSecond; }
double accel_from_ticks(std::int32_t ticks) { return static_cast<double>(ticks) / kAccelTicksPerG; }
double gyro_from_ticks(std::int32_t ticks) { return static_cast<double>(ticks) / kGyroTicksPerDps; }
// Same two divisions as reading "<uT>" text and converting to tesla.
double mag_from_ticks(std::int32_t ticks) { return static_cast<double>(ticks) / kMagTicksPerMicrotesla / 1e6; }

ImuSample quantize(const ImuSample& s) {
  ImuSample q;
  q.t = time_from_ticks(time_ticks(s.t));
  q.accel = {accel_from_ticks(accel_ticks(s.accel.x)), accel_from_ticks(accel_ticks(s.accel.y)),
             accel_from_ticks(accel_ticks(s.accel.z)), Unit::kG};
  q.gyro = {gyro_from_ticks(gyro_ticks(s.gyro.x)), gyro_from_ticks(gyro_ticks(s.gyro.y)),
            gyro_from_ticks(gyro_ticks(s.gyro.z)), Unit::kDegPerSecond};
  q.mag = {mag_from_ticks(mag_ticks(s.mag.x)), mag_from_ticks(mag_ticks(s.mag.y)), mag_from_ticks(mag_ticks(s.mag.z)),
           Unit::kTesla};
  return q;
}

}  // namespace device_grid

std::string format_fixed(std::int64_t ticks, int decimals) {
  std::uint64_t mag = ticks < 0 ? 0 - static_cast<std::uint64_t>(ticks) : static_cast<std::uint64_t>(ticks);
  std::uint64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  std::string out = ticks < 0 ? "-" : "";
  out += std::to_string(mag / scale);
  if (decimals > 0) {
    std::string frac = std::to_string(mag % scale);
    out += '.';
    out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    out += frac;
  }
  return out;
}

ImuTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceError("trace CSV is empty");
  if (!line.empty() && line.back() == '\r') throw TraceError("trace CSV must use LF line endings");
  if (line != kHeader) throw TraceError("unexpected trace CSV header: '" + line + "'");

  ImuTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 10> v{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view text = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                     : comma - start);
      if (field >= v.size()) throw TraceError("line " + std::to_string(line_no) + ": too many fields");
      v[field++] = parse_field(text, line_no);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != v.size()) throw TraceError("line " + std::to_string(line_no) + ": expected 10 fields");
    ImuSample s;
    s.t = v[0];
    s.accel = {v[1], v[2], v[3], Unit::kG};
    s.gyro = {v[4], v[5], v[6], Unit::kDegPerSecond};
    s.mag = {v[7] / 1e6, v[8] / 1e6, v[9] / 1e6, Unit::kTesla};
    trace.push_back(s);
  }
  validate_trace(trace);
  return trace;
}

ImuTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file " + path.string());
  return read_trace_csv(in);
}

void write_trace_csv(std::ostream& out, const ImuTrace& trace) {
  using namespace device_grid;
  out << kHeader << '\n';
  for (const ImuSample& s : trace) {
    out << format_fixed(time_ticks(s.t), 6) << ',' << format_fixed(accel_ticks(s.accel.x), 6) << ','
        << format_fixed(accel_ticks(s.accel.y), 6) << ',' << format_fixed(accel_ticks(s.accel.z), 6) << ','
        << format_fixed(gyro_ticks(s.gyro.x), 4) << ',' << format_fixed(gyro_ticks(s.gyro.y), 4) << ','
        << format_fixed(gyro_ticks(s.gyro.z), 4) << ',' << format_fixed(mag_ticks(s.mag.x), 3) << ','
        << format_fixed(mag_ticks(s.mag.y), 3) << ',' << format_fixed(mag_ticks(s.mag.z), 3) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const ImuTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError("cannot write trace file " + path.string());
  write_trace_csv(out, trace);
  if (!out) throw TraceError("error writing trace file " + path.string());
}

}  // namespace airloc
