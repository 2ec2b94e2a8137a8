#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "airloc/pdr.hpp"
#include "airloc/simkit.hpp"

using namespace airloc;

namespace {

using Kind = QrParseError::Kind;

Kind qr_error_kind(std::string_view text) {
  try {
    parse_qr_payload(text);
  } catch (const QrParseError& e) {
    return e.kind();
  }
  FAIL("payload parsed: " << std::string(text));
  return Kind::kMalformed;
}

ImuTrace static_trace(std::size_t n) {
  ImuTrace trace;
  for (std::size_t i = 0; i < n; ++i) {
    ImuSample s;
    s.t = 0.01 * static_cast<double>(i);
    s.accel = {0, 0, 1, Unit::kG};
    s.mag = {2e-5, 0, -4e-5, Unit::kTesla};
    trace.push_back(s);
  }
  return trace;
}

// Profile whose stride equals `stride_m`.
UserProfile profile_for(double stride_m) { return {stride_m * 100.0 / stride_constant(Sex::kMale), Sex::kMale}; }

}  // namespace

TEST_CASE("step length") {
  CHECK(step_length_cm({180.0, Sex::kMale}) == doctest::Approx(74.70).epsilon(1e-12));
  CHECK(step_length_cm({170.0, Sex::kFemale}) == doctest::Approx(70.21).epsilon(1e-12));
  CHECK(step_length_cm({180.0, Sex::kMale}) == 180.0 * 0.415);
  CHECK(step_length_cm({1e-9, Sex::kFemale}) < 1e-8);
  CHECK_THROWS_AS(step_length_cm({0.0, Sex::kMale}), PdrError);
  CHECK_THROWS_AS(step_length_cm({-170.0, Sex::kMale}), PdrError);
  CHECK_THROWS_AS(step_length_cm({std::nan(""), Sex::kMale}), PdrError);

  CHECK(parse_sex("female") == Sex::kFemale);
  CHECK(parse_sex("m") == Sex::kMale);
  CHECK_THROWS_AS(parse_sex("x"), PdrError);
}

TEST_CASE("QR payload examples") {
  CHECK(parse_qr_payload("AIRLOC;v=1;b=3;f=2;x=10.5;y=4.0") == Anchor{3, 2, 10.5, 4.0});
  CHECK(parse_qr_payload("AIRLOC;y=-1.25;x=0;f=-1;b=7;v=1") == Anchor{7, -1, 0.0, -1.25});
  CHECK(encode_qr_payload({0, 0, 0.0, 0.0}) == "AIRLOC;v=1;b=0;f=0;x=0;y=0");
  CHECK(encode_qr_payload({3, 2, 10.5, 4.0}) == "AIRLOC;v=1;b=3;f=2;x=10.5;y=4");
  CHECK(encode_qr_payload({1, 1, -0.0, 0.1}) == "AIRLOC;v=1;b=1;f=1;x=0;y=0.1");
}

TEST_CASE("QR payload errors are distinguished") {
  CHECK(qr_error_kind("AIRLOC;v=2;b=3;f=2;x=10.5;y=4.0") == Kind::kUnknownVersion);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;f=2;x=10.5") == Kind::kMissingField);
  CHECK(qr_error_kind("AIRLOC;b=3;f=2;x=10.5;y=4") == Kind::kMissingField);
  CHECK(qr_error_kind("AIRLOC;v=1;b=three;f=2;x=10.5;y=4.0") == Kind::kNonNumeric);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;f=2;x=1e3;y=4.0") == Kind::kNonNumeric);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;f=2;x=.5;y=4.0") == Kind::kNonNumeric);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;f=2;x=nan;y=4.0") == Kind::kNonNumeric);
  CHECK(qr_error_kind("AIRLOC;v=1;b=99999999999999999999;f=2;x=1;y=4") == Kind::kNonNumeric);
  CHECK(qr_error_kind("GATE;v=1;b=3;f=2;x=10.5;y=4.0") == Kind::kBadPrefix);
  CHECK(qr_error_kind("") == Kind::kBadPrefix);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;f=2;x=10.5;y=4.0;") == Kind::kMalformed);
  CHECK(qr_error_kind("AIRLOC;v=1;b") == Kind::kMalformed);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;f=2;x=10.5;y=4.0;gate=12") == Kind::kUnknownField);
  CHECK(qr_error_kind("AIRLOC;v=1;b=3;b=3;f=2;x=10.5;y=4.0") == Kind::kDuplicateField);
}

TEST_CASE("QR payload round trip") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::int64_t> id(-1'000'000, 1'000'000);
  std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
  for (int i = 0; i < 2000; ++i) {
    const Anchor a{id(rng), id(rng) % 50, coord(rng), coord(rng)};
    const std::string text = encode_qr_payload(a);
    REQUIRE(parse_qr_payload(text) == a);
    REQUIRE(encode_qr_payload(parse_qr_payload(text)) == text);
  }
  CHECK(encode_qr_payload(parse_qr_payload("AIRLOC;f=2;b=3;v=1;x=010.50;y=4.0")) == "AIRLOC;v=1;b=3;f=2;x=10.5;y=4");
}

TEST_CASE("step detector") {
  SUBCASE("constant 1 g gives no steps") {
    std::vector<double> t(500), a(500, 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.01 * static_cast<double>(i);
    CHECK(detect_steps(t, a).empty());
  }
  SUBCASE("empty input") { CHECK(detect_steps({}, {}).empty()); }
  SUBCASE("50 scripted impulses") {
    const GroundTruthWalk walk = generate_walk({{0, 0}, {35, 0}}, 0.7, 1.8);
    REQUIRE(walk.steps.size() == 50);
    const SyntheticTrace sim = synthesize_imu(walk, SensorModel{});
    std::vector<double> t, a;
    for (const ImuSample& s : sim.trace) {
      t.push_back(s.t);
      a.push_back(s.accel.norm());
    }
    const auto steps = detect_steps(t, a);
    CHECK(std::abs(static_cast<int>(steps.size()) - 50) <= 1);
  }
  SUBCASE("refractory interval merges close impulses") {
    std::vector<double> t(200), a(200, 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.01 * static_cast<double>(i);
    a[50] = 1.6;
    a[60] = 1.6;  // 0.1 s later
    CHECK(detect_steps(t, a) == std::vector<double>{0.5});
    CHECK(detect_steps(t, a, {1.2, 0.05}).size() == 2);
  }
  SUBCASE("plateau counts once") {
    std::vector<double> t{0, 1, 2, 3, 4}, a{1.0, 1.5, 1.5, 1.0, 1.0};
    CHECK(detect_steps(t, a, {1.2, 0.0}) == std::vector<double>{1.0});
  }
  SUBCASE("non-increasing time is rejected") {
    std::vector<double> t{0, 1, 1}, a{1, 1, 1};
    CHECK_THROWS_AS(detect_steps(t, a), PdrError);
  }
}

TEST_CASE("advance_position") {
  const Position2 p = advance_position({0, 0}, 0.0, 1.0);
  CHECK(p.x == 1.0);
  CHECK(p.y == 0.0);
  const Position2 q = advance_position({0, 0}, kPi / 2, 1.0);
  CHECK(std::abs(q.x) < 1e-12);
  CHECK(std::abs(q.y - 1.0) < 1e-12);

  Position2 s{0, 0};
  for (double yaw : {0.0, kPi / 2, kPi, 3 * kPi / 2}) s = advance_position(s, yaw, 1.0);
  CHECK(std::abs(s.x) < 1e-9);
  CHECK(std::abs(s.y) < 1e-9);
}

TEST_CASE("run_pdr on a static trace returns only the anchor") {
  const Anchor anchor{3, 2, 10.5, 4.0};
  const Trajectory tr = run_pdr(static_trace(1000), {175, Sex::kFemale}, anchor, FilterKind::kMadgwick);
  REQUIRE(tr.points.size() == 1);
  CHECK(tr.points[0] == TrajectoryPoint{0.0, 10.5, 4.0, 2});
  CHECK(tr.steps.empty());
  CHECK(tr.travelled_distance() == 0.0);
  CHECK_THROWS_AS(run_pdr({}, {175, Sex::kFemale}, anchor, FilterKind::kMadgwick), FilterError);
  CHECK_THROWS_AS(run_pdr(static_trace(10), {0, Sex::kFemale}, anchor, FilterKind::kMadgwick), PdrError);
}

TEST_CASE("run_pdr properties on a synthetic walk") {
  const GroundTruthWalk walk = generate_walk({{0, 0}, {30, 0}, {30, 20}, {5, 20}}, 0.75, 1.8);
  const SyntheticTrace sim = synthesize_imu(walk, SensorModel{});
  const Anchor anchor{1, 0, 0.0, 0.0};

  for (FilterKind kind : kAllFilterKinds) {
    CAPTURE(to_string(kind));
    const Trajectory base = run_pdr(sim.trace, profile_for(0.75), anchor, kind);

    SUBCASE("anchor and timestamps") {
      CHECK(base.points.front() == TrajectoryPoint{sim.trace.front().t, 0.0, 0.0, 0});
      for (std::size_t i = 1; i < base.points.size(); ++i) {
        REQUIRE(base.points[i].t >= base.points[i - 1].t);
        REQUIRE(base.points[i].floor == 0);
      }
    }
    SUBCASE("distance is steps times stride") {
      CHECK(base.travelled_distance() == static_cast<double>(base.steps.size()) * base.stride_m);
      for (const StepEvent& s : base.steps) REQUIRE(s.length == base.stride_m);
    }
    SUBCASE("translation equivariance") {
      std::mt19937_64 rng(5);
      std::uniform_real_distribution<double> shift(-500.0, 500.0);
      for (int i = 0; i < 10; ++i) {
        const Anchor moved{anchor.building, anchor.floor, shift(rng), shift(rng)};
        const Trajectory t = run_pdr(sim.trace, profile_for(0.75), moved, kind);
        REQUIRE(t.points.size() == base.points.size());
        for (std::size_t k = 0; k < t.points.size(); ++k) {
          REQUIRE(std::abs(t.points[k].x - base.points[k].x - moved.x) <= 1e-9);
          REQUIRE(std::abs(t.points[k].y - base.points[k].y - moved.y) <= 1e-9);
          REQUIRE(t.points[k].t == base.points[k].t);
        }
      }
    }
    SUBCASE("step count does not depend on anchor or profile") {
      const Trajectory other = run_pdr(sim.trace, {150, Sex::kFemale}, {9, 4, -20, 7}, kind);
      CHECK(other.steps.size() == base.steps.size());
      CHECK(other.points.back().floor == 4);
    }
    SUBCASE("oracle consistency") {
      CHECK(base.steps.size() == walk.steps.size());
      CHECK(std::abs(base.travelled_distance() - walk.walked_distance()) <= 0.05 * walk.walked_distance());
      const double final_heading = base.steps.back().heading;
      CHECK(std::abs(rad_to_deg(wrap_angle(final_heading - walk.steps.back().heading))) < 2.0);
    }
  }
}

TEST_CASE("100 m straight walk") {
  const double stride = 0.747;
  const GroundTruthWalk walk = generate_walk({{0, 0}, {100, 0}}, stride, 1.8);
  const SyntheticTrace sim = synthesize_imu(walk, SensorModel{});
  const UserProfile profile{180.0, Sex::kMale};  // 74.70 cm stride
  const Trajectory tr = run_pdr(sim.trace, profile, {}, FilterKind::kMadgwick);

  const double distance = tr.travelled_distance();
  CHECK(std::abs(distance - 100.0) <= 5.0);
  const double stride_error = std::abs(tr.stride_m - stride) / stride;
  MESSAGE("travelled " << distance << " m over " << tr.steps.size() << " steps, per-stride error "
                       << 100.0 * stride_error << "%");
  CHECK(stride_error <= 0.01);
  CHECK(std::abs(tr.points.back().x - walk.steps.back().end.x) < 0.05 * 100.0);
  CHECK(std::abs(tr.points.back().y) < 1.0);
}

TEST_CASE("trajectory CSV round trip") {
  const GroundTruthWalk walk = generate_walk({{0, 0}, {10, 10}}, 0.7, 2.0);
  const SyntheticTrace sim = synthesize_imu(walk, SensorModel{});
  const Trajectory tr = run_pdr(sim.trace, {172.5, Sex::kFemale}, {2, -1, 3.25, -8.5}, FilterKind::kMahony);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  CHECK(ss.str().rfind("t,x,y,floor\n", 0) == 0);
  CHECK(read_trajectory_csv(ss) == tr.points);

  std::stringstream bad("t,x,y\n");
  CHECK_THROWS_AS(read_trajectory_csv(bad), PdrError);
}
