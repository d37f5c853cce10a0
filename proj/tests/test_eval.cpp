#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "osmloc/error.hpp"
#include "osmloc/eval.hpp"

using namespace osmloc;

namespace {

EvalRecord rec(double px, double py, double pt, double gx, double gy, double gt) {
  EvalRecord r;
  r.predicted = Pose{px, py, pt};
  r.ground_truth = Pose{gx, gy, gt};
  return r;
}

}  // namespace

TEST_CASE("position recall: exact, halves, strict boundary") {
  std::vector<EvalRecord> exact = {rec(1, 2, 0.1, 1, 2, 0.1), rec(-3, 4, 0.0, -3, 4, 0.0)};
  CHECK(position_recall(exact, 1.0) == doctest::Approx(1.0));

  std::vector<EvalRecord> halves = {rec(0.5, 0, 0, 0, 0, 0), rec(10, 0, 0, 0, 0, 0)};
  CHECK(position_recall(halves, 1.0) == doctest::Approx(0.5));

  // hand-placed errors: 3.0 m is excluded by the strict inequality
  std::vector<EvalRecord> fixture;
  const double errors[10] = {0.5, 1.5, 2.9, 3.0, 0.2, 4.9, 5.0, 7.1, 0.9, 2.99};
  for (const double e : errors) fixture.push_back(rec(e, 0, 0, 0, 0, 0));
  CHECK(position_recall(fixture, 1.0) == doctest::Approx(3.0 / 10.0));  // 0.5, 0.2, 0.9
  CHECK(position_recall(fixture, 3.0) == doctest::Approx(6.0 / 10.0));  // + 1.5, 2.9, 2.99
  CHECK(position_recall(fixture, 5.0) == doctest::Approx(8.0 / 10.0));  // + 3.0, 4.9

  CHECK_THROWS_AS(position_recall({}, 1.0), InvariantError);
}

TEST_CASE("orientation recall wraps across the +-pi seam") {
  // pred just below +pi, gt just above -pi: wrapped error 0.02 rad ~ 1.15 deg
  std::vector<EvalRecord> seam = {rec(0, 0, kPi - 0.01, 0, 0, -kPi + 0.01)};
  CHECK(orientation_recall(seam, 3.0) == doctest::Approx(1.0));
  CHECK(orientation_recall(seam, 1.0) == doctest::Approx(0.0));

  std::vector<EvalRecord> exact = {rec(0, 0, 0.4, 0, 0, 0.4)};
  CHECK(orientation_recall(exact, 1.0) == doctest::Approx(1.0));

  // fixture against hand computation: errors 0.5, 2.0, 4.0 degrees
  const double deg = kPi / 180.0;
  std::vector<EvalRecord> fixture = {rec(0, 0, 0.5 * deg, 0, 0, 0),
                                     rec(0, 0, 0, 0, 0, 2.0 * deg),
                                     rec(0, 0, -2.0 * deg, 0, 0, 2.0 * deg)};
  CHECK(orientation_recall(fixture, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(orientation_recall(fixture, 3.0) == doctest::Approx(2.0 / 3.0));
  CHECK(orientation_recall(fixture, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("APE and AOE") {
  std::vector<EvalRecord> perfect = {rec(1, 1, 0.5, 1, 1, 0.5)};
  const auto zero = ape_aoe(perfect);
  CHECK(zero.ape_m == doctest::Approx(0.0));
  CHECK(zero.aoe_deg == doctest::Approx(0.0));

  // single 3-4-5 offset
  std::vector<EvalRecord> pythagoras = {rec(3, 4, 0, 0, 0, 0)};
  CHECK(ape_aoe(pythagoras).ape_m == doctest::Approx(5.0));

  // hand-computed means
  const double deg = kPi / 180.0;
  std::vector<EvalRecord> fixture = {rec(1, 0, 10 * deg, 0, 0, 0),
                                     rec(0, 2, 0, 0, 0, 20 * deg),
                                     rec(0, 0, kPi - 0.02, 0, 3, -kPi + 0.02)};
  const auto errs = ape_aoe(fixture);
  CHECK(errs.ape_m == doctest::Approx((1.0 + 2.0 + 3.0) / 3.0));
  CHECK(errs.aoe_deg ==
        doctest::Approx((10.0 + 20.0 + 0.04 / deg) / 3.0).epsilon(1e-9));
}

TEST_CASE("lateral/longitudinal decomposition in the viewing frame") {
  // error purely along the heading: all longitudinal
  std::vector<EvalRecord> ahead = {rec(2, 0, 0, 0, 0, 0)};  // gt faces east, error east
  const auto along = lat_lon_decompose(ahead, {{1, 1}, {3, 3}});
  CHECK(along.alat_m == doctest::Approx(0.0));
  CHECK(along.alon_m == doctest::Approx(2.0));
  CHECK(along.lon_recall[0] == doctest::Approx(0.0));  // 2 m >= 1 m
  CHECK(along.lon_recall[1] == doctest::Approx(1.0));
  CHECK(along.lat_recall[0] == doctest::Approx(1.0));

  // gt heading 90 degrees (north), error 1 m east: purely lateral
  std::vector<EvalRecord> side = {rec(1, 0, kPi / 2, 0, 0, kPi / 2)};
  const auto lat = lat_lon_decompose(side, {{1, 1}, {3, 3}});
  CHECK(lat.alat_m == doctest::Approx(1.0));
  CHECK(lat.alon_m == doctest::Approx(0.0));

  // rotation arithmetic oracle on a random-ish fixture
  std::vector<EvalRecord> mixed = {rec(1.0, 2.0, 0.0, 0.5, 0.75, 0.6)};
  const double ex = 0.5, ey = 1.25;
  const double lon_expect = std::abs(ex * std::cos(0.6) + ey * std::sin(0.6));
  const double lat_expect = std::abs(ex * std::sin(0.6) - ey * std::cos(0.6));
  const auto m = lat_lon_decompose(mixed, {{1, 1}});
  CHECK(m.alon_m == doctest::Approx(lon_expect).epsilon(1e-12));
  CHECK(m.alat_m == doctest::Approx(lat_expect).epsilon(1e-12));

  // exact predictions: every recall is 1
  std::vector<EvalRecord> exact = {rec(4, 5, 1.0, 4, 5, 1.0)};
  const auto perfect = lat_lon_decompose(exact, {{1, 1}, {3, 3}, {5, 5}});
  for (const double v : perfect.lat_recall) CHECK(v == doctest::Approx(1.0));
  for (const double v : perfect.lon_recall) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("top-k recall curve") {
  const Threshold t{1.0, 5.0};

  EvalRecord hit_at_3 = rec(10, 0, 0, 0, 0, 0);
  hit_at_3.top_candidates = {Pose{5, 0, 0}, Pose{0, 3, 2.0}, Pose{0.2, 0, 0.01},
                             Pose{0, 0, 0}};
  EvalRecord hit_at_1 = rec(0.1, 0, 0, 0, 0, 0);
  hit_at_1.top_candidates = {Pose{0.1, 0, 0}, Pose{9, 9, 0}, Pose{9, 9, 0}, Pose{9, 9, 0}};

  std::vector<EvalRecord> records = {hit_at_3, hit_at_1};
  const auto curve = recall_curve_topk(records, t, 4);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0] == doctest::Approx(0.5));  // only hit_at_1
  CHECK(curve[1] == doctest::Approx(0.5));
  CHECK(curve[2] == doctest::Approx(1.0));  // hit_at_3 joins from k = 3
  CHECK(curve[3] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] >= curve[i - 1]);

  // k = 1 joint mode equals PR AND OR on the first candidate
  std::vector<EvalRecord> joint = {hit_at_1};
  joint[0].top_candidates = {Pose{0.5, 0, 3.0}};  // close in position, bad angle
  CHECK(recall_curve_topk(joint, t, 1, TopkMode::Joint)[0] == doctest::Approx(0.0));
  CHECK(recall_curve_topk(joint, t, 1, TopkMode::Marginal)[0] == doctest::Approx(1.0));

  // exhaustive per-k scan oracle on a random fixture
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> err(0.0, 2.0);
  std::vector<EvalRecord> random_records;
  for (int i = 0; i < 20; ++i) {
    EvalRecord r = rec(5, 5, 0, 0, 0, 0);
    for (int k = 0; k < 6; ++k) {
      r.top_candidates.push_back(Pose{err(rng), err(rng), err(rng) * 0.05});
    }
    random_records.push_back(std::move(r));
  }
  const auto fast = recall_curve_topk(random_records, t, 6);
  for (int k = 1; k <= 6; ++k) {
    int success = 0;
    for (const auto& r : random_records) {
      bool any = false;
      for (int i = 0; i < k; ++i) {
        const auto& c = r.top_candidates[i];
        const double pe = std::hypot(c.x - r.ground_truth.x, c.y - r.ground_truth.y);
        const double oe = angle_abs_diff(c.theta, r.ground_truth.theta) * 180.0 / kPi;
        if (pe < t.position_m && oe < t.orientation_deg) any = true;
      }
      if (any) ++success;
    }
    CHECK(fast[k - 1] == doctest::Approx(double(success) / 20.0));
  }

  EvalRecord shallow = rec(0, 0, 0, 0, 0, 0);
  shallow.top_candidates = {Pose{0, 0, 0}};
  CHECK_THROWS_AS(recall_curve_topk({shallow}, t, 2), InvariantError);
}

TEST_CASE("metrics are invariant to 2*pi angle shifts and record order") {
  std::vector<EvalRecord> base = {rec(1, 0, 0.3, 0, 0, 0.1), rec(0, 2, -2.9, 0, 0, 3.0)};
  std::vector<EvalRecord> shifted = base;
  shifted[0].predicted.theta += 2.0 * kPi;
  shifted[1].ground_truth.theta -= 2.0 * kPi;
  std::swap(shifted[0], shifted[1]);

  CHECK(orientation_recall(base, 3.0) == doctest::Approx(orientation_recall(shifted, 3.0)));
  CHECK(ape_aoe(base).aoe_deg == doctest::Approx(ape_aoe(shifted).aoe_deg));
  CHECK(ape_aoe(base).ape_m == doctest::Approx(ape_aoe(shifted).ape_m));
}

TEST_CASE("records CSV round trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "osmloc_eval_test";
  fs::create_directories(dir);
  const auto path = (dir / "records.csv").string();

  std::vector<EvalRecord> records = {rec(1.5, -2.25, 0.7, 1.0, -2.0, 0.65),
                                     rec(0.0, 0.0, -3.0, 0.1, 0.2, 3.1)};
  records[0].frame = "000";
  records[1].frame = "001";
  write_records_csv(path, records);
  const auto back = read_records_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].frame == "000");
  CHECK(back[0].predicted.x == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(back[1].ground_truth.y == doctest::Approx(0.2).epsilon(1e-9));

  fs::remove_all(dir);
}
