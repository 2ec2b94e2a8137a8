// airloc command-line front end.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "airloc/fourq/ecdh.hpp"
#include "airloc/fusion.hpp"
#include "airloc/hex.hpp"
#include "airloc/imu.hpp"
#include "airloc/pdr.hpp"
#include "airloc/secure_link/stream.hpp"
#include "airloc/simkit.hpp"
#include "airloc/snow3g.hpp"

namespace {

using namespace airloc;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --seed wins over AIRLOC_SEED; nullopt when neither is set.
std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  const char* env = std::getenv("AIRLOC_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const char* end = env + std::strlen(env);
  const auto [p, ec] = std::from_chars(env, end, v);
  if (ec != std::errc() || p != end) throw UsageError(std::string("AIRLOC_SEED is not an unsigned integer: ") + env);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

// replay --------------------------------------------------------------------

struct ReplayArgs {
  std::string trace;
  double height_cm = 0.0;
  std::string sex;
  std::string qr;
  std::string filter = "madgwick";
  std::string out;
};

int cmd_replay(const ReplayArgs& a) {
  const UserProfile profile{a.height_cm, parse_sex(a.sex)};
  const Anchor anchor = parse_qr_payload(a.qr);
  const FilterKind kind = parse_filter_kind(a.filter);
  step_length_cm(profile);  // validates the height before the trace is read
  const ImuTrace trace = read_trace_csv(std::filesystem::path(a.trace));
  const Trajectory traj = run_pdr(trace, profile, anchor, kind);

  auto out = open_out(a.out);
  write_trajectory_csv(out, traj);
  check_written(out, a.out);

  const TrajectoryPoint& last = traj.points.back();
  std::cout << "steps: " << traj.steps.size() << '\n'
            << std::setprecision(6) << std::fixed << "stride_m: " << traj.stride_m << '\n'
            << "distance_m: " << traj.travelled_distance() << '\n'
            << "end: x=" << last.x << " y=" << last.y << " floor=" << last.floor << '\n';
  return kExitOk;
}

// filters -------------------------------------------------------------------

struct FiltersArgs {
  std::string trace;
  std::string truth;
  std::string out;
  std::string plot;
};

// Three stacked panels (yaw, pitch, roll) with one polyline per filter.
void write_svg_plot(const std::string& path, const FilterComparison& cmp) {
  constexpr double kW = 900, kPanelH = 220, kMargin = 50;
  constexpr const char* kColors[] = {"#ff7f0e", "#1f77b4", "#2ca02c"};  // madgwick, mahony, kalman
  constexpr const char* kTitles[] = {"yaw [deg]", "pitch [deg]", "roll [deg]"};

  auto out = open_out(path);
  const double height = 3 * kPanelH + 2 * kMargin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double t0 = cmp.t.front();
  const double t1 = std::max(cmp.t.back(), t0 + 1e-9);
  for (int axis = 0; axis < 3; ++axis) {
    auto angle = [&](const EulerAngles& e) { return rad_to_deg(axis == 0 ? e.yaw : axis == 1 ? e.pitch : e.roll); };
    double lo = 1e300, hi = -1e300;
    for (const auto& series : cmp.euler) {
      for (const auto& e : series) {
        lo = std::min(lo, angle(e));
        hi = std::max(hi, angle(e));
      }
    }
    if (hi - lo < 1.0) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double top = kMargin + axis * kPanelH;
    const double plot_h = kPanelH - 30;
    out << "<text x=\"" << kMargin << "\" y=\"" << top - 5 << "\" font-size=\"12\">" << kTitles[axis] << " ["
        << std::setprecision(4) << lo << ", " << hi << "]</text>\n"
        << "<rect x=\"" << kMargin << "\" y=\"" << top << "\" width=\"" << kW - 2 * kMargin << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (std::size_t k = 0; k < cmp.euler.size(); ++k) {
      out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << kColors[k] << "\" points=\"";
      const std::size_t stride = std::max<std::size_t>(1, cmp.t.size() / 2000);
      for (std::size_t i = 0; i < cmp.t.size(); i += stride) {
        const double x = kMargin + (cmp.t[i] - t0) / (t1 - t0) * (kW - 2 * kMargin);
        const double y = top + plot_h - (angle(cmp.euler[k][i]) - lo) / (hi - lo) * plot_h;
        out << std::setprecision(6) << x << ',' << y << ' ';
      }
      out << "\"/>\n";
    }
  }
  for (std::size_t k = 0; k < kAllFilterKinds.size(); ++k) {
    out << "<text x=\"" << kMargin + 120.0 * static_cast<double>(k) << "\" y=\"" << height - 15
        << "\" font-size=\"12\" fill=\"" << kColors[k] << "\">" << to_string(kAllFilterKinds[k]) << "</text>\n";
  }
  out << "</svg>\n";
  check_written(out, path);
}

int cmd_filters(const FiltersArgs& a) {
  const ImuTrace trace = read_trace_csv(std::filesystem::path(a.trace));
  if (trace.empty()) throw std::runtime_error("trace is empty");

  std::vector<Quaternion> truth;
  if (!a.truth.empty()) {
    for (const TruthRow& r : read_truth_csv(std::filesystem::path(a.truth))) truth.push_back(r.q);
    if (truth.size() != trace.size()) {
      throw std::runtime_error("truth has " + std::to_string(truth.size()) + " rows but the trace has " +
                               std::to_string(trace.size()) + " samples");
    }
  }
  const FilterComparison cmp = compare_filters(trace, a.truth.empty() ? nullptr : &truth);

  auto out = open_out(a.out);
  write_comparison_csv(out, cmp);
  check_written(out, a.out);
  if (!a.plot.empty()) write_svg_plot(a.plot, cmp);

  std::cout << "samples: " << trace.size() << '\n';
  if (cmp.rms) {
    std::cout << "rms_deg    yaw        pitch      roll\n";
    for (std::size_t k = 0; k < kAllFilterKinds.size(); ++k) {
      const AxisRms& r = (*cmp.rms)[k];
      std::cout << std::left << std::setw(10) << to_string(kAllFilterKinds[k]) << std::right << std::fixed
                << std::setprecision(4) << std::setw(10) << r.yaw_deg << ' ' << std::setw(10) << r.pitch_deg << ' '
                << std::setw(10) << r.roll_deg << '\n';
    }
  }
  return kExitOk;
}

// gen-walk ------------------------------------------------------------------

struct GenWalkArgs {
  std::string waypoints = "0,0;100,0";
  double stride = 0.747;
  double cadence = 1.8;
  SensorModel model;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string truth;
};

std::vector<Position2> parse_waypoints(const std::string& text) {
  std::vector<Position2> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw UsageError("waypoint '" + item + "' is not x,y");
    Position2 p;
    const char* b = item.data();
    const char* e = item.data() + item.size();
    const auto r1 = std::from_chars(b, b + comma, p.x);
    const auto r2 = std::from_chars(b + comma + 1, e, p.y);
    if (r1.ec != std::errc() || r1.ptr != b + comma || r2.ec != std::errc() || r2.ptr != e) {
      throw UsageError("waypoint '" + item + "' is not x,y");
    }
    pts.push_back(p);
  }
  return pts;
}

int cmd_gen_walk(GenWalkArgs a) {
  if (const auto s = resolve_seed(a.seed)) a.model.seed = *s;
  const GroundTruthWalk walk = generate_walk(parse_waypoints(a.waypoints), a.stride, a.cadence);
  const SyntheticTrace sim = synthesize_imu(walk, a.model);

  auto out = open_out(a.out);
  write_trace_csv(out, sim.trace);
  check_written(out, a.out);
  if (!a.truth.empty()) {
    auto tout = open_out(a.truth);
    write_truth_csv(tout, sim);
    check_written(tout, a.truth);
  }
  std::cout << "samples: " << sim.trace.size() << '\n'
            << "steps: " << walk.steps.size() << '\n'
            << std::fixed << std::setprecision(6) << "walked_m: " << walk.walked_distance() << '\n'
            << "dropped_m: " << walk.dropped << '\n'
            << "seed: " << a.model.seed << '\n';
  return kExitOk;
}

// handshake-demo -----------------------------------------------------------

struct HandshakeArgs {
  std::string transport = "inproc";
  std::size_t frames = 100;
  std::string trace;
  std::string out;
  bool inject_replay = false;
  std::optional<std::uint64_t> seed;
};

ImuTrace synthetic_frames(std::size_t n) {
  if (n == 0) return {};
  SensorModel model;
  const double stride = 0.7, cadence = 1.8;
  const double seconds = static_cast<double>(n) / model.sample_rate;
  const double length = std::max(2.0 * stride, seconds * cadence * stride);
  const SyntheticTrace sim = synthesize_imu(generate_walk({{0, 0}, {length, 0}}, stride, cadence), model);
  ImuTrace t = sim.trace;
  if (t.size() > n) t.resize(n);
  return t;
}

int cmd_handshake_demo(const HandshakeArgs& a) {
  const ImuTrace source = a.trace.empty() ? synthetic_frames(a.frames) : read_trace_csv(std::filesystem::path(a.trace));

  link::TransportPair pair;
  if (a.transport == "inproc") {
    pair = link::make_inproc_pair();
  } else if (a.transport == "socket") {
    pair = link::make_socket_pair();
  } else {
    throw UsageError("unknown transport '" + a.transport + "' (inproc|socket)");
  }
  std::unique_ptr<link::Transport> device_end = std::move(pair.first);
  if (a.inject_replay) {
    // Send 0 is the device hello; duplicate a data frame from the middle.
    const std::size_t index = 1 + source.size() / 2;
    device_end = std::make_unique<link::FaultInjectingTransport>(std::move(device_end), index);
  }

  std::unique_ptr<fourq::EntropySource> dev_entropy, phone_entropy;
  link::StreamOptions opts;
  if (const auto seed = resolve_seed(a.seed)) {
    dev_entropy = std::make_unique<fourq::SeededEntropy>(*seed);
    phone_entropy = std::make_unique<fourq::SeededEntropy>(*seed ^ 0x9E3779B97F4A7C15ull);
    opts.device_entropy = dev_entropy.get();
    opts.phone_entropy = phone_entropy.get();
  }

  std::cout << "transport: " << a.transport << '\n'
            << "device -> phone: hello (role=device, ephemeral point 64 octets)\n"
            << "phone -> device: hello (role=phone, ephemeral point 64 octets, salt 8 octets)\n";
  const auto t0 = std::chrono::steady_clock::now();
  const link::StreamResult r = link::stream_session(source, *device_end, *pair.second, opts);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  std::cout << "session key: <redacted>\n"
            << "salt: " << hex::encode(r.salt) << '\n'
            << "frames sent: " << r.frames_sent << '\n'
            << "samples delivered: " << r.delivered.size() << '\n'
            << "replay rejections: " << r.replay_rejections << '\n'
            << std::fixed << std::setprecision(1) << "elapsed_ms: " << ms << '\n';

  if (!a.out.empty()) {
    auto out = open_out(a.out);
    write_trace_csv(out, r.delivered);
    check_written(out, a.out);
  }

  if (r.error) {
    std::cerr << "error: session terminated (" << link::to_string(r.error->kind()) << "): " << r.error->what() << '\n';
    return kExitRuntime;
  }
  const bool lossless = bitwise_equal(r.delivered, source);
  std::cout << "delivery: " << (lossless ? "lossless" : "MISMATCH") << '\n';
  if (r.replay_rejections != 0) {
    std::cerr << "replay report: " << r.replay_rejections << " replayed frame(s) rejected\n";
    return kExitRuntime;
  }
  return lossless ? kExitOk : kExitRuntime;
}

// bench-ecdh ----------------------------------------------------------------

int cmd_bench_ecdh(std::size_t iterations, std::optional<std::uint64_t> seed_flag) {
  if (iterations == 0) throw UsageError("--iterations must be at least 1");
  std::unique_ptr<fourq::EntropySource> entropy;
  if (const auto seed = resolve_seed(seed_flag)) {
    entropy = std::make_unique<fourq::SeededEntropy>(*seed);
  } else {
    entropy = std::make_unique<fourq::SystemEntropy>();
  }

  std::vector<double> ms;
  ms.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fourq::KeyPair a = fourq::keygen(*entropy);
    fourq::KeyPair b = fourq::keygen(*entropy);
    const fourq::SharedKey ka = fourq::ecdh_shared_key(a.secret, b.public_key);
    const fourq::SharedKey kb = fourq::ecdh_shared_key(b.secret, a.public_key);
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    a.secret.wipe();
    b.secret.wipe();
    if (ka != kb) throw std::runtime_error("ECDH keys disagree");
  }
  double mean = 0.0;
  for (double v : ms) mean += v;
  mean /= static_cast<double>(ms.size());
  std::vector<double> sorted = ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  std::cout << "ECDH EXECUTION TIME (full exchange: 2 key generations + 2 shared secrets)\n"
            << "+-------+--------------+--------------+------------+\n"
            << "| Curve | mean [ms]    | median [ms]  | iterations |\n"
            << "+-------+--------------+--------------+------------+\n"
            << "| FourQ | " << std::fixed << std::setprecision(4) << std::setw(12) << mean << " | " << std::setw(12)
            << median << " | " << std::setw(10) << iterations << " |\n"
            << "+-------+--------------+--------------+------------+\n"
            << "note: timings depend on the machine and implementation. The 417/721/1876 ms reference\n"
            << "figures were measured on a different device and are not asserted here.\n";
  return kExitOk;
}

// snow3g-vectors ------------------------------------------------------------

int cmd_snow3g_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 0, tuples = 0, failures = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key_hex, iv_hex, z1_hex, z2_hex, extra;
    if (!(fields >> key_hex >> iv_hex >> z1_hex >> z2_hex) || (fields >> extra)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'key_hex iv_hex z1_hex z2_hex'");
    }
    const auto key = hex::decode_fixed<16>(key_hex);
    const auto iv = hex::decode_fixed<16>(iv_hex);
    const auto z1 = hex::decode_fixed<4>(z1_hex);
    const auto z2 = hex::decode_fixed<4>(z2_hex);
    if (!key || !iv || !z1 || !z2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed hex field");
    }
    ++tuples;
    snow3g::CipherState st = snow3g::initialize(*key, *iv);
    const std::uint32_t got[2] = {snow3g::next_word(st), snow3g::next_word(st)};
    const std::array<std::uint8_t, 4>* want[2] = {&*z1, &*z2};
    for (int w = 0; w < 2; ++w) {
      const std::uint32_t expected = std::uint32_t{(*want[w])[0]} << 24 | std::uint32_t{(*want[w])[1]} << 16 |
                                     std::uint32_t{(*want[w])[2]} << 8 | (*want[w])[3];
      if (got[w] != expected) {
        ++failures;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%08x", got[w]);
        std::cout << "FAIL tuple " << tuples << " (line " << line_no << ", key " << key_hex << ", iv " << iv_hex
                  << "): z" << w + 1 << " expected " << (w ? z2_hex : z1_hex) << " got " << buf << '\n';
      }
    }
  }
  if (tuples == 0) throw UsageError(path + " contains no test vectors");
  if (failures) {
    std::cout << failures << " mismatch(es) in " << tuples << " tuple(s)\n";
    return kExitRuntime;
  }
  std::cout << "ok: " << tuples << " tuple(s) match\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor positioning from foot-mounted IMU data, with an encrypted sensor link"};
  app.name("airloc");
  app.require_subcommand(1);

  ReplayArgs replay;
  auto* c_replay = app.add_subcommand("replay", "Reconstruct a trajectory from a trace and a QR anchor");
  c_replay->add_option("--trace", replay.trace, "Trace CSV")->required();
  c_replay->add_option("--height", replay.height_cm, "Walker height in cm")->required();
  c_replay->add_option("--sex", replay.sex, "m or f")->required();
  c_replay->add_option("--qr", replay.qr, "QR payload, e.g. AIRLOC;v=1;b=1;f=0;x=0;y=0")->required();
  c_replay->add_option("--filter", replay.filter, "madgwick, mahony or kalman")->capture_default_str();
  c_replay->add_option("--out", replay.out, "Trajectory CSV to write")->required();

  FiltersArgs filters;
  auto* c_filters = app.add_subcommand("filters", "Run all three attitude filters over a trace");
  c_filters->add_option("--trace", filters.trace, "Trace CSV")->required();
  c_filters->add_option("--truth", filters.truth, "Ground-truth CSV (t,qw,qx,qy,qz,x,y)");
  c_filters->add_option("--out", filters.out, "Per-sample comparison CSV")->required();
  c_filters->add_option("--plot", filters.plot, "Also write an SVG line plot");

  GenWalkArgs gen;
  auto* c_gen = app.add_subcommand("gen-walk", "Synthesize a walk and its IMU trace");
  c_gen->add_option("--waypoints", gen.waypoints, "x,y;x,y;... in meters")->capture_default_str();
  c_gen->add_option("--stride", gen.stride, "Stride in m")->capture_default_str();
  c_gen->add_option("--cadence", gen.cadence, "Steps per second")->capture_default_str();
  c_gen->add_option("--rate", gen.model.sample_rate, "Sample rate in Hz")->capture_default_str();
  c_gen->add_option("--accel-noise", gen.model.accel_noise_std, "Accelerometer noise std in g");
  c_gen->add_option("--gyro-noise", gen.model.gyro_noise_std, "Gyroscope noise std in deg/s");
  c_gen->add_option("--gyro-bias", gen.model.gyro_bias, "Gyroscope bias in deg/s");
  c_gen->add_option("--mag-noise", gen.model.mag_noise_std, "Magnetometer noise std in tesla");
  c_gen->add_option("--seed", gen.seed, "RNG seed (default: AIRLOC_SEED or 1)");
  c_gen->add_option("--out", gen.out, "Trace CSV to write")->required();
  c_gen->add_option("--truth", gen.truth, "Ground-truth CSV to write");

  HandshakeArgs hs;
  auto* c_hs = app.add_subcommand("handshake-demo", "Handshake and stream frames between a device and a phone");
  c_hs->add_option("--transport", hs.transport, "inproc or socket")->capture_default_str();
  c_hs->add_option("--frames", hs.frames, "Synthetic frames to stream")->capture_default_str();
  c_hs->add_option("--trace", hs.trace, "Stream this trace instead of synthetic frames");
  c_hs->add_option("--out", hs.out, "Write the delivered trace as CSV");
  c_hs->add_flag("--inject-replay", hs.inject_replay, "Duplicate one frame mid-stream (test hook)");
  c_hs->add_option("--seed", hs.seed, "Deterministic ephemeral keys (default: AIRLOC_SEED or system entropy)");

  std::size_t bench_iterations = 10;
  std::optional<std::uint64_t> bench_seed;
  auto* c_bench = app.add_subcommand("bench-ecdh", "Time full FourQ ECDH exchanges");
  c_bench->add_option("--iterations", bench_iterations, "Exchanges to time")->capture_default_str();
  c_bench->add_option("--seed", bench_seed, "Deterministic keys");

  std::string vectors_path;
  auto* c_vec = app.add_subcommand("snow3g-vectors", "Check SNOW 3G against key/IV/keystream tuples");
  c_vec->add_option("--vectors", vectors_path, "Fixture file: key_hex iv_hex z1_hex z2_hex per line")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (c_replay->parsed()) return cmd_replay(replay);
    if (c_filters->parsed()) return cmd_filters(filters);
    if (c_gen->parsed()) return cmd_gen_walk(gen);
    if (c_hs->parsed()) return cmd_handshake_demo(hs);
    if (c_bench->parsed()) return cmd_bench_ecdh(bench_iterations, bench_seed);
    if (c_vec->parsed()) return cmd_snow3g_vectors(vectors_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
