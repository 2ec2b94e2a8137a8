#include <cmath>
#include <ostream>
#include <string>

#include "airloc/fusion.hpp"
#include "airloc/simd/kernels.hpp"

namespace airloc {

namespace {

struct ConvertedTrace {
  std::vector<double> accel;  // m/s^2, interleaved xyz
  std::vector<double> gyro;   // rad/s, interleaved xyz
};

// Device units -> SI for the whole trace at once.
ConvertedTrace convert_units(const ImuTrace& trace) {
  const std::size_t n = trace.size();
  std::vector<double> accel_g(3 * n), gyro_dps(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    accel_g[3 * i] = trace[i].accel.x;
    accel_g[3 * i + 1] = trace[i].accel.y;
    accel_g[3 * i + 2] = trace[i].accel.z;
    gyro_dps[3 * i] = trace[i].gyro.x;
    gyro_dps[3 * i + 1] = trace[i].gyro.y;
    gyro_dps[3 * i + 2] = trace[i].gyro.z;
  }
  ConvertedTrace out{std::vector<double>(3 * n), std::vector<double>(3 * n)};
  simd::scale(accel_g, kStandardGravity, out.accel);
  simd::scale(gyro_dps, kPi / 180.0, out.gyro);
  return out;
}

double sq(double v) { return v * v; }

}  // namespace

std::vector<OrientationSample> run_filter(FilterKind kind, const ImuTrace& trace, std::optional<FilterGains> gains) {
  if (trace.empty()) throw FilterError("trace is empty");
  for (const ImuSample& s : trace) {
    if (s.accel.unit != Unit::kG || s.gyro.unit != Unit::kDegPerSecond || s.mag.unit != Unit::kTesla) {
      throw FilterError("trace samples must be in device units (g, deg/s, T)");
    }
  }
  validate_trace(trace);

  const ConvertedTrace si = convert_units(trace);
  FilterState state = filter_init(kind, gains);
  std::vector<OrientationSample> out;
  out.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    double dt = 0.01;
    if (i > 0) {
      dt = trace[i].t - trace[i - 1].t;
    } else if (trace.size() > 1) {
      dt = trace[1].t - trace[0].t;
    }
    const Vec3 gyro{si.gyro[3 * i], si.gyro[3 * i + 1], si.gyro[3 * i + 2], Unit::kRadPerSecond};
    const Vec3 accel{si.accel[3 * i], si.accel[3 * i + 1], si.accel[3 * i + 2], Unit::kMetersPerSecond2};
    state = filter_update(state, gyro, accel, trace[i].mag, dt);
    out.push_back({trace[i].t, state.q, quat_to_euler(state.q)});
  }
  return out;
}

AxisRms rms_error(const std::vector<EulerAngles>& estimate, const std::vector<Quaternion>& truth) {
  if (estimate.size() != truth.size()) throw FilterError("truth length does not match trace length");
  if (estimate.empty()) return {};
  double yaw = 0.0, pitch = 0.0, roll = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const EulerAngles ref = quat_to_euler(truth[i].normalized());
    yaw += sq(wrap_angle(estimate[i].yaw - ref.yaw));
    pitch += sq(estimate[i].pitch - ref.pitch);
    roll += sq(wrap_angle(estimate[i].roll - ref.roll));
  }
  const double n = static_cast<double>(estimate.size());
  return {rad_to_deg(std::sqrt(yaw / n)), rad_to_deg(std::sqrt(pitch / n)), rad_to_deg(std::sqrt(roll / n))};
}

FilterComparison compare_filters(const ImuTrace& trace, const std::vector<Quaternion>* truth) {
  if (truth && truth->size() != trace.size()) throw FilterError("truth length does not match trace length");
  FilterComparison cmp;
  for (std::size_t k = 0; k < kAllFilterKinds.size(); ++k) {
    const auto run = run_filter(kAllFilterKinds[k], trace);
    if (k == 0) {
      cmp.t.reserve(run.size());
      for (const auto& o : run) cmp.t.push_back(o.t);
    }
    cmp.euler[k].reserve(run.size());
    for (const auto& o : run) cmp.euler[k].push_back(o.euler);
  }
  if (truth) {
    std::array<AxisRms, 3> rms{};
    for (std::size_t k = 0; k < rms.size(); ++k) rms[k] = rms_error(cmp.euler[k], *truth);
    cmp.rms = rms;
  }
  return cmp;
}

void write_comparison_csv(std::ostream& out, const FilterComparison& cmp) {
  out << "t";
  for (FilterKind k : kAllFilterKinds) {
    const std::string suffix = "_" + std::string(to_string(k));
    out << ",yaw" << suffix << ",pitch" << suffix << ",roll" << suffix;
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < cmp.t.size(); ++i) {
    out << cmp.t[i];
    for (const auto& series : cmp.euler) {
      const EulerAngles& e = series[i];
      out << ',' << rad_to_deg(e.yaw) << ',' << rad_to_deg(e.pitch) << ',' << rad_to_deg(e.roll);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace airloc
