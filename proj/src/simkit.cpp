#include "airloc/simkit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

namespace airloc {

namespace {

constexpr double kSegmentEpsilon = 1e-9;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Unwrapped true yaw as a function of time.  The heading is held around each
// step and changes linearly in the gap between two bumps.
class YawProfile {
 public:
  YawProfile(const GroundTruthWalk& walk, const SensorModel& model, const std::vector<double>& step_times)
      : step_times_(step_times), half_width_(model.step_width / 2.0) {
    double yaw = model.initial_yaw;
    yaw_.reserve(walk.steps.size());
    for (const TrueStep& s : walk.steps) {
      yaw += wrap_angle(s.heading - yaw);
      yaw_.push_back(yaw);
    }
    initial_ = model.initial_yaw;
    first_turn_start_ = model.lead_in / 4.0;
  }

  double at(double t) const {
    if (yaw_.empty()) return initial_;
    // Before the first step: turn from the initial yaw to the first heading.
    if (t <= step_times_[0] - half_width_) {
      return ramp(t, first_turn_start_, step_times_[0] - half_width_, initial_, yaw_[0]);
    }
    for (std::size_t k = 1; k < step_times_.size(); ++k) {
      if (t <= step_times_[k] - half_width_) {
        return ramp(t, step_times_[k - 1] + half_width_, step_times_[k] - half_width_, yaw_[k - 1], yaw_[k]);
      }
    }
    return yaw_.back();
  }

 private:
  static double ramp(double t, double t0, double t1, double y0, double y1) {
    if (y0 == y1 || t <= t0) return y0;
    if (t >= t1) return y1;
    return y0 + (y1 - y0) * (t - t0) / (t1 - t0);
  }

  const std::vector<double>& step_times_;
  std::vector<double> yaw_;
  double half_width_;
  double initial_ = 0.0;
  double first_turn_start_ = 0.0;
};

}  // namespace

GroundTruthWalk generate_walk(const std::vector<Position2>& waypoints, double stride, double cadence) {
  if (waypoints.size() < 2) throw SimError("a walk needs at least two waypoints");
  if (!(stride > 0.0) || !std::isfinite(stride)) throw SimError("stride must be positive");
  if (!(cadence > 0.0) || !std::isfinite(cadence)) throw SimError("cadence must be positive");

  GroundTruthWalk walk;
  walk.waypoints = waypoints;
  walk.stride = stride;
  walk.cadence = cadence;
  Position2 pos = waypoints.front();
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double dx = waypoints[i].x - waypoints[i - 1].x;
    const double dy = waypoints[i].y - waypoints[i - 1].y;
    const double len = std::hypot(dx, dy);
    if (!(len > 0.0) || !std::isfinite(len)) throw SimError("consecutive waypoints must be distinct and finite");
    const double heading = std::atan2(dy, dx);
    const auto n = static_cast<std::size_t>(std::floor(len / stride + kSegmentEpsilon));
    for (std::size_t k = 0; k < n; ++k) {
      pos = advance_position(pos, heading, stride);
      walk.steps.push_back({heading, pos});
    }
    walk.path_length += len;
    walk.dropped += std::max(0.0, len - static_cast<double>(n) * stride);
  }
  return walk;
}

SyntheticTrace synthesize_imu(const GroundTruthWalk& walk, const SensorModel& model) {
  if (!(model.sample_rate > 0.0) || !std::isfinite(model.sample_rate)) throw SimError("sample rate must be positive");
  if (model.accel_noise_std < 0.0 || model.gyro_noise_std < 0.0 || model.mag_noise_std < 0.0) {
    throw SimError("noise parameters must be non-negative");
  }
  if (!(model.step_width > 0.0) || model.lead_in < 0.0 || model.lead_out < 0.0) {
    throw SimError("bad step timing parameters");
  }
  if (walk.steps.size() > 1 && model.step_width >= 1.0 / walk.cadence) {
    throw SimError("step bumps overlap at this cadence");
  }

  SyntheticTrace out;
  const double period = 1.0 / walk.cadence;
  for (std::size_t k = 0; k < walk.steps.size(); ++k) {
    out.step_times.push_back(model.lead_in + (static_cast<double>(k) + 0.5) * period);
  }
  const double duration = model.lead_in + static_cast<double>(walk.steps.size()) * period + model.lead_out;
  const auto n_samples = static_cast<std::size_t>(std::ceil(duration * model.sample_rate)) + 1;

  const YawProfile yaw(walk, model, out.step_times);
  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  auto noise = [&](double std_dev) { return std_dev > 0.0 ? std_dev * unit_normal(rng) : 0.0; };

  const double half_width = model.step_width / 2.0;
  const Vec3 z_axis{0.0, 0.0, 1.0};
  std::size_t next_step = 0;  // first step whose bump has not fully passed
  std::size_t steps_taken = 0;
  double prev_t = 0.0;
  double prev_yaw = yaw.at(0.0);
  out.trace.reserve(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double t = device_grid::time_from_ticks(
        device_grid::time_ticks(static_cast<double>(j) / model.sample_rate));
    const double psi = yaw.at(t);
    const double rate = j == 0 ? 0.0 : (psi - prev_yaw) / (t - prev_t);
    prev_t = t;
    prev_yaw = psi;

    while (next_step < out.step_times.size() && t > out.step_times[next_step] + half_width) ++next_step;
    double bump = 0.0;
    if (next_step < out.step_times.size()) {
      const double u = t - (out.step_times[next_step] - half_width);
      if (u > 0.0 && u < model.step_width) bump = model.step_amplitude * std::sin(kPi * u / model.step_width);
    }
    while (steps_taken < out.step_times.size() && out.step_times[steps_taken] <= t) ++steps_taken;

    const Quaternion q = Quaternion::from_axis_angle(z_axis, psi);
    const Vec3 field = rotate_vector_inverse(q, model.world_field);

    ImuSample s;
    s.t = t;
    s.accel = {noise(model.accel_noise_std), noise(model.accel_noise_std), 1.0 + bump + noise(model.accel_noise_std),
               Unit::kG};
    s.gyro = {model.gyro_bias + noise(model.gyro_noise_std), model.gyro_bias + noise(model.gyro_noise_std),
              rad_to_deg(rate) + model.gyro_bias + noise(model.gyro_noise_std), Unit::kDegPerSecond};
    s.mag = {field.x + noise(model.mag_noise_std), field.y + noise(model.mag_noise_std),
             field.z + noise(model.mag_noise_std), Unit::kTesla};
    out.trace.push_back(device_grid::quantize(s));
    out.orientation.push_back(q);
    out.position.push_back(steps_taken == 0 ? walk.waypoints.front() : walk.steps[steps_taken - 1].end);
  }
  return out;
}

void write_truth_csv(std::ostream& out, const SyntheticTrace& sim) {
  out << "t,qw,qx,qy,qz,x,y\n";
  for (std::size_t i = 0; i < sim.trace.size(); ++i) {
    const Quaternion& q = sim.orientation[i];
    out << format_fixed(device_grid::time_ticks(sim.trace[i].t), 6) << ',' << shortest(q.w) << ',' << shortest(q.x)
        << ',' << shortest(q.y) << ',' << shortest(q.z) << ',' << shortest(sim.position[i].x) << ','
        << shortest(sim.position[i].y) << '\n';
  }
}

void write_truth_csv(const std::filesystem::path& path, const SyntheticTrace& sim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot write truth file " + path.string());
  write_truth_csv(out, sim);
}

std::vector<TruthRow> read_truth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,qw,qx,qy,qz,x,y") throw SimError("bad truth CSV header");
  std::vector<TruthRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[7];
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 7; ++i) {
      const auto res = std::from_chars(cur, end, v[i]);
      if (res.ec != std::errc{}) throw SimError("bad truth row: " + line);
      cur = res.ptr;
      if (i < 6) {
        if (cur == end || *cur != ',') throw SimError("bad truth row: " + line);
        ++cur;
      }
    }
    if (cur != end) throw SimError("bad truth row: " + line);
    rows.push_back({v[0], {v[1], v[2], v[3], v[4]}, {v[5], v[6]}});
  }
  return rows;
}

std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("cannot open truth file " + path.string());
  return read_truth_csv(in);
}

}  // namespace airloc
