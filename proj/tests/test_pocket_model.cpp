#include <doctest.h>

#include <cmath>
#include <random>
#include <fstream>
#include <sstream>

#include "vinesense/error.hpp"
#include "vinesense/pocket_model.hpp"
#include "vinesense/sensitivity_table.hpp"

using namespace vinesense;

namespace {

ContactSpec top(double area = 12.5) {
  ContactSpec c;
  c.contact_area_cm2 = area;
  return c;
}

PocketConfig at_pressure(PocketConfig cfg, double p) {
  cfg.initial_pressure_kpa = p;
  return cfg;
}

double slope(const PocketConfig& cfg, const ContactSpec& c) { return sensitivity_for(cfg, c).slope_kpa_per_n; }

template <typename F>
void expect_code(F&& f, ErrorCode code) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("presets validate and identify themselves") {
  for (auto p : {PocketPreset::Control, PocketPreset::Small, PocketPreset::Thin, PocketPreset::Sealed}) {
    const auto cfg = PocketConfig::preset(p);
    CHECK_NOTHROW(cfg.validate());
    REQUIRE(identify_preset(cfg).has_value());
    CHECK(*identify_preset(cfg) == p);
  }
  CHECK(PocketConfig::sealed().subpocket_count() == 4);
  CHECK(PocketConfig::control().subpocket_count() == 1);

  auto odd = PocketConfig::control();
  odd.pre_inflated_length_cm = 31.0;
  CHECK_FALSE(identify_preset(odd).has_value());
  expect_code([&] { sensitivity_for(odd, top()); }, ErrorCode::UnsupportedConfig);
}

TEST_CASE("invalid pocket geometry is rejected") {
  auto cfg = PocketConfig::sealed();
  cfg.subpocket_lengths_cm.pop_back();
  expect_code([&] { cfg.validate(); }, ErrorCode::InvalidArgument);
  auto neg = PocketConfig::control();
  neg.initial_pressure_kpa = -0.1;
  expect_code([&] { neg.validate(); }, ErrorCode::InvalidArgument);
}

TEST_CASE("tabulated conditions return the table slope") {
  CHECK(slope(PocketConfig::control(), top()) == doctest::Approx(0.31).epsilon(1e-15));
  auto side = top();
  side.face = RadialFace::Side;
  CHECK(slope(PocketConfig::control(), side) == doctest::Approx(0.51).epsilon(1e-15));
  CHECK(slope(PocketConfig::small(), top()) == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(slope(at_pressure(PocketConfig::control(), 0.7), top()) == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(slope(at_pressure(PocketConfig::control(), 1.0), top()) == doctest::Approx(0.24).epsilon(1e-15));
  CHECK(slope(PocketConfig::sealed(), top()) == doctest::Approx(0.38).epsilon(1e-15));
  auto sub2 = top();
  sub2.subpocket_index = 2;
  CHECK(slope(PocketConfig::sealed(), sub2) == doctest::Approx(0.39).epsilon(1e-15));
  CHECK(sensitivity_for(PocketConfig::control(), top()).provenance == Provenance::PaperTable);
}

TEST_CASE("every built-in row is reproduced exactly by sensitivity_for") {
  for (const auto& row : SensitivityTable::builtin().rows()) {
    auto cfg = at_pressure(PocketConfig::preset(row.preset), row.initial_pressure_kpa);
    ContactSpec c;
    c.face = row.face;
    c.contact_area_cm2 = row.contact_area_cm2;
    c.subpocket_index = row.subpocket_index;
    if (row.lengthwise_cm) c.lengthwise_fraction = *row.lengthwise_cm / cfg.pre_inflated_length_cm;
    const auto s = sensitivity_for(cfg, c);
    CAPTURE(row.source_figure);
    CHECK(s.slope_kpa_per_n == row.slope_kpa_per_n);
    CHECK(s.provenance == Provenance::PaperTable);
  }
}

TEST_CASE("pressure midpoint interpolates linearly") {
  // Halfway between 0.31 at 0.4 kPa and 0.28 at 0.7 kPa.
  const auto s = sensitivity_for(at_pressure(PocketConfig::control(), 0.55), top());
  CHECK(s.slope_kpa_per_n == doctest::Approx(0.295).epsilon(1e-12));
  CHECK(s.provenance == Provenance::Interpolated);
}

TEST_CASE("lengthwise position does not change the slope") {
  for (double f = 0.0; f <= 1.0; f += 0.05) {
    auto c = top();
    c.lengthwise_fraction = f;
    CHECK(slope(PocketConfig::control(), c) == 0.31);
  }
}

TEST_CASE("out-of-range and unsupported conditions are refused") {
  expect_code([] { sensitivity_for(at_pressure(PocketConfig::control(), 1.2), top()); }, ErrorCode::UnsupportedConfig);
  expect_code([] { sensitivity_for(at_pressure(PocketConfig::control(), 0.3), top()); }, ErrorCode::UnsupportedConfig);
  expect_code([] { sensitivity_for(PocketConfig::control(), top(40.0)); }, ErrorCode::UnsupportedConfig);
  expect_code([] { sensitivity_for(PocketConfig::control(), top(5.0)); }, ErrorCode::UnsupportedConfig);
  for (int end : {0, 3}) {
    auto c = top();
    c.subpocket_index = end;
    expect_code([&] { sensitivity_for(PocketConfig::sealed(), c); }, ErrorCode::UnsupportedConfig);
  }
  auto bad = top();
  bad.subpocket_index = 4;
  expect_code([&] { sensitivity_for(PocketConfig::sealed(), bad); }, ErrorCode::InvalidArgument);
}

TEST_CASE("slope is non-increasing in pressure and area and keeps the factor ordering") {
  const int n = 61;
  for (int i = 0; i < n; ++i) {
    const double p = 0.4 + 0.6 * i / (n - 1);
    double prev_area_slope = INFINITY;
    for (int j = 0; j < n; ++j) {
      const double a = 6.9 + (25.0 - 6.9) * j / (n - 1);
      const double control = slope(at_pressure(PocketConfig::control(), p), top(a));
      CAPTURE(p);
      CAPTURE(a);
      CHECK(control <= prev_area_slope + 1e-15);
      prev_area_slope = control;
      if (i > 0) {
        const double p_prev = 0.4 + 0.6 * (i - 1) / (n - 1);
        CHECK(control <= slope(at_pressure(PocketConfig::control(), p_prev), top(a)) + 1e-15);
      }
      auto side = top(a);
      side.face = RadialFace::Side;
      CHECK(slope(at_pressure(PocketConfig::control(), p), side) > control);
      CHECK(slope(at_pressure(PocketConfig::sealed(), p), top(a)) > control);
      CHECK(slope(at_pressure(PocketConfig::small(), p), top(a)) > control);
    }
  }
}

TEST_CASE("force estimate and pressure prediction examples") {
  const Sensitivity s031{0.31, Provenance::PaperTable};
  CHECK(estimate_force({0.40, 0.71}, s031) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate_force({0.40, 0.40}, s031) == 0.0);
  // 150 g mass on the 8.75 g medium disk.
  const double f = (150.0 + 8.75) * 1e-3 * kGravity;
  CHECK(f == doctest::Approx(1.557).epsilon(1e-3));
  CHECK(estimate_force({0.40, 0.40 + 0.31 * f}, s031) == doctest::Approx(f).epsilon(1e-12));
  CHECK(predict_pressure_change(0.0, s031) == 0.0);
  CHECK(predict_pressure_change(1.557, s031) == doctest::Approx(0.48267).epsilon(1e-12));
  CHECK(predict_pressure_change(4.5, {0.51, Provenance::PaperTable}) == doctest::Approx(2.295).epsilon(1e-12));
  // Below-baseline readings come back negative, unclamped.
  CHECK(estimate_force({0.40, 0.30}, s031) < 0.0);
  expect_code([] { estimate_force({0.4, 0.5}, {0.0, Provenance::Fitted}); }, ErrorCode::InvalidArgument);
  expect_code([&] { predict_pressure_change(-1.0, s031); }, ErrorCode::InvalidArgument);
}

TEST_CASE("estimate and predict round-trip") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> force(0.01, 50.0), sens(0.05, 1.0), p0(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double f = force(rng);
    const Sensitivity s{sens(rng), Provenance::Fitted};
    const double base = p0(rng);
    const double back = estimate_force({base, base + predict_pressure_change(f, s)}, s);
    CHECK(std::abs(back - f) <= 1e-12 * f);
  }
}

TEST_CASE("step response follows the exponential lag") {
  const Sensitivity s{0.31, Provenance::PaperTable};
  DynamicsConfig quiet{1.0, 0.0};
  std::vector<double> force(100, 1.0);  // 5 s at 0.05 s
  const auto p = response_with_dynamics(force, s, 0.4, 0.05, quiet, 1);
  CHECK(p.back() == doctest::Approx(0.4 + 0.31 * (1.0 - std::exp(-5.0))).epsilon(1e-12));
  CHECK(p.back() - 0.4 == doctest::Approx(0.3079).epsilon(1e-3));
  for (std::size_t k = 0; k < p.size(); ++k)
    CHECK(p[k] == doctest::Approx(0.4 + 0.31 * (1.0 - std::exp(-0.05 * double(k + 1)))).epsilon(1e-12));
  // The result does not depend on how the interval is cut.
  const auto coarse = response_with_dynamics(std::vector<double>(10, 1.0), s, 0.4, 0.5, quiet, 1);
  CHECK(coarse.back() == doctest::Approx(p.back()).epsilon(1e-12));
}

TEST_CASE("release returns to baseline and unloaded readings stay within 3 sigma") {
  const Sensitivity s{0.31, Provenance::PaperTable};
  DynamicsConfig dyn{1.0, 0.01};
  std::vector<double> force(200, 0.0);
  std::fill(force.begin(), force.begin() + 100, 2.0);
  const auto p = response_with_dynamics(force, s, 0.4, 0.05, dyn, 9);
  CHECK(std::abs(p.back() - 0.4) <= 3 * 0.01 + 0.62 * std::exp(-5.0));

  const auto idle = response_with_dynamics(std::vector<double>(2000, 0.0), s, 0.4, 0.05, dyn, 3);
  int outside = 0;
  for (double v : idle) outside += std::abs(v - 0.4) > 3 * 0.01;
  CHECK(outside < 20);  // about 0.27% expected
}

TEST_CASE("noise is measurement only and seeded") {
  const Sensitivity s{0.31, Provenance::PaperTable};
  PocketResponse a(0.4, s, {1.0, 0.05}), b(0.4, s, {1.0, 0.0});
  Rng r1(5), r2(5);
  for (int i = 0; i < 50; ++i) {
    a.advance(1.0, 0.05, r1);
    b.advance(1.0, 0.05, r2);
  }
  CHECK(a.state() == b.state());
  const auto x = response_with_dynamics(std::vector<double>(20, 1.0), s, 0.4, 0.05, {1.0, 0.05}, 77);
  const auto y = response_with_dynamics(std::vector<double>(20, 1.0), s, 0.4, 0.05, {1.0, 0.05}, 77);
  CHECK(x == y);
}

TEST_CASE("table file round-trips and matches the built-in copy") {
  std::stringstream ss;
  SensitivityTable::builtin().save(ss);
  const auto back = SensitivityTable::load(ss);
  REQUIRE(back.rows().size() == 15);
  for (std::size_t i = 0; i < 15; ++i) {
    const auto& a = SensitivityTable::builtin().rows()[i];
    const auto& b = back.rows()[i];
    CHECK(a.preset == b.preset);
    CHECK(a.face == b.face);
    CHECK(a.lengthwise_cm == b.lengthwise_cm);
    CHECK(a.contact_area_cm2 == b.contact_area_cm2);
    CHECK(a.initial_pressure_kpa == b.initial_pressure_kpa);
    CHECK(a.subpocket_index == b.subpocket_index);
    CHECK(a.slope_kpa_per_n == b.slope_kpa_per_n);
    CHECK(a.source_figure == b.source_figure);
  }

  std::ifstream shipped(VINESENSE_DATA_DIR "/sensitivity_table_v1.csv");
  REQUIRE(shipped);
  const auto disk = SensitivityTable::load(shipped);
  REQUIRE(disk.rows().size() == 15);
  for (std::size_t i = 0; i < 15; ++i)
    CHECK(disk.rows()[i].slope_kpa_per_n == SensitivityTable::builtin().rows()[i].slope_kpa_per_n);
}

TEST_CASE("table loader rejects bad files") {
  std::istringstream no_version("config_preset,radial_face\n");
  expect_code([&] { SensitivityTable::load(no_version); }, ErrorCode::MissingColumn);
  std::istringstream future("# vinesense-sensitivity-table v2\n");
  expect_code([&] { SensitivityTable::load(future); }, ErrorCode::UnsupportedConfig);
}

TEST_CASE("a custom table drives sensitivity_for") {
  SensitivityRow r;
  r.slope_kpa_per_n = 0.5;
  SensitivityTable t({r});
  CHECK(sensitivity_for(PocketConfig::control(), top(), t).slope_kpa_per_n == 0.5);
  expect_code([&] { sensitivity_for(PocketConfig::small(), top(), t); }, ErrorCode::UnsupportedConfig);
}
