#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "airloc/pdr.hpp"
#include "airloc/simd/kernels.hpp"

namespace airloc {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Sex parse_sex(std::string_view text) {
  if (text == "m" || text == "male") return Sex::kMale;
  if (text == "f" || text == "female") return Sex::kFemale;
  throw PdrError("sex must be m or f, got '" + std::string(text) + "'");
}

double stride_constant(Sex sex) { return sex == Sex::kMale ? 0.415 : 0.413; }

double step_length_cm(const UserProfile& profile) {
  if (!std::isfinite(profile.height_cm) || profile.height_cm <= 0.0) throw PdrError("height must be positive");
  return profile.height_cm * stride_constant(profile.sex);
}

std::vector<std::size_t> detect_step_indices(std::span<const double> t, std::span<const double> accel_norm_g,
                                             const StepDetectorConfig& cfg) {
  if (t.size() != accel_norm_g.size()) throw PdrError("time and magnitude streams differ in length");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw PdrError("timestamps not strictly increasing");
  }
  std::vector<std::size_t> peaks;
  double last = -INFINITY;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double a = accel_norm_g[i];
    if (a <= cfg.threshold_g || !(a > accel_norm_g[i - 1]) || a < accel_norm_g[i + 1]) continue;
    if (t[i] - last < cfg.refractory_s) continue;
    peaks.push_back(i);
    last = t[i];
  }
  return peaks;
}

std::vector<double> detect_steps(std::span<const double> t, std::span<const double> accel_norm_g,
                                 const StepDetectorConfig& cfg) {
  std::vector<double> times;
  for (std::size_t i : detect_step_indices(t, accel_norm_g, cfg)) times.push_back(t[i]);
  return times;
}

Position2 advance_position(Position2 pos, double yaw, double length_m) {
  return {pos.x + length_m * std::cos(yaw), pos.y + length_m * std::sin(yaw)};
}

double Trajectory::travelled_distance() const { return static_cast<double>(steps.size()) * stride_m; }

Trajectory run_pdr(const ImuTrace& trace, const UserProfile& profile, const Anchor& anchor, FilterKind kind,
                   const PdrConfig& cfg) {
  if (!std::isfinite(anchor.x) || !std::isfinite(anchor.y)) throw PdrError("anchor coordinates must be finite");
  const double stride_m = step_length_cm(profile) / 100.0;
  const auto orientation = run_filter(kind, trace, cfg.gains);

  const std::size_t n = trace.size();
  std::vector<double> t(n), ax(n), ay(n), az(n), norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = trace[i].t;
    ax[i] = trace[i].accel.x;
    ay[i] = trace[i].accel.y;
    az[i] = trace[i].accel.z;
  }
  simd::norm3(ax, ay, az, norm);

  Trajectory out;
  out.stride_m = stride_m;
  out.points.push_back({trace.front().t, anchor.x, anchor.y, anchor.floor});
  // Displacement is accumulated from the origin and offset by the anchor, so
  // the path shape never depends on where the anchor is.
  Position2 offset;
  for (std::size_t i : detect_step_indices(t, norm, cfg.detector)) {
    const double heading = orientation[i].euler.yaw;
    offset = advance_position(offset, heading, stride_m);
    out.steps.push_back({t[i], heading, stride_m});
    out.points.push_back({t[i], anchor.x + offset.x, anchor.y + offset.y, anchor.floor});
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,x,y,floor\n";
  for (const TrajectoryPoint& p : trajectory.points) {
    out << shortest(p.t) << ',' << shortest(p.x) << ',' << shortest(p.y) << ',' << p.floor << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PdrError("cannot write trajectory file " + path.string());
  write_trajectory_csv(out, trajectory);
}

std::vector<TrajectoryPoint> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y,floor") throw PdrError("bad trajectory CSV header");
  std::vector<TrajectoryPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrajectoryPoint p;
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    auto field = [&](auto& value) {
      const auto res = std::from_chars(cur, end, value);
      if (res.ec != std::errc{}) throw PdrError("bad trajectory row: " + line);
      cur = res.ptr;
      if (cur != end) {
        if (*cur != ',') throw PdrError("bad trajectory row: " + line);
        ++cur;
      }
    };
    field(p.t);
    field(p.x);
    field(p.y);
    field(p.floor);
    points.push_back(p);
  }
  return points;
}

}  // namespace airloc
