#include <doctest.h>

#include <numbers>
#include <sstream>

#include "vinesense/error.hpp"
#include "vinesense/scenario.hpp"

using namespace vinesense;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_scenario(in, "t");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ScenarioParse);
    return e.detail();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_CASE("full scenario parses") {
  std::istringstream in(R"(# comment line

{"type":"world","seed":42,"dt":0.1,"duration_s":30,"initial_length_cm":10,"initial_state":"searching_right","base":{"x":1,"y":2,"heading_deg":0}}
{"type":"controller","grow_timeout_s":10,"contact_threshold_kpa":1.2}
{"type":"steering","kappa_max":0.05}
{"type":"sim","noise_sigma_kpa":0,"pockets_per_side":4,"max_penetration_cm":0.5}
{"type":"obstacle","x":30,"y":40,"radius_cm":12,"stiffness_n_per_cm":2}
{"type":"touch","t":5,"pocket":"R1","force_n":3,"duration_s":2}
{"type":"touch","t":2,"x":-6,"y":20,"force_n":1,"duration_s":1}
)");
  const auto sc = parse_scenario(in, "full");
  CHECK(sc.name == "full");
  CHECK(sc.setup.seed == 42);
  CHECK(sc.setup.sim.dt == 0.1);
  CHECK(sc.duration_s == 30.0);
  CHECK(sc.setup.initial_length_cm == 10.0);
  CHECK(sc.setup.initial_mode == Mode::SearchingRight);
  CHECK(sc.setup.base.position.x() == 1.0);
  CHECK(sc.setup.base.heading == 0.0);
  CHECK(sc.setup.controller.grow_timeout_s == 10.0);
  CHECK(sc.setup.controller.search_timeout_s == 15.0);
  CHECK(sc.setup.controller.contact_threshold_kpa == 1.2);
  CHECK(sc.setup.sim.steering.kappa_max == 0.05);
  CHECK(sc.setup.sim.dynamics.noise_sigma_kpa == 0.0);
  CHECK(sc.setup.sim.layout.pockets_per_side == 4);
  CHECK(sc.setup.sim.contact.max_penetration_cm == 0.5);
  REQUIRE(sc.setup.obstacles.size() == 1);
  CHECK(sc.setup.obstacles[0].radius_cm == 12.0);
  REQUIRE(sc.setup.touches.size() == 2);
  CHECK(*sc.setup.touches[0].touch.pocket_id == "R1");
  CHECK_FALSE(sc.setup.touches[1].touch.pocket_id);
}

TEST_CASE("defaults when a scenario is empty") {
  std::istringstream in("");
  const auto sc = parse_scenario(in);
  CHECK(sc.setup.obstacles.empty());
  CHECK(sc.setup.base.heading == doctest::Approx(std::numbers::pi / 2));
  CHECK(sc.setup.initial_mode == Mode::GrowingStraight);
}

TEST_CASE("errors name the offending line") {
  CHECK(parse_error("{\"type\":\"world\"}\nnot json\n") == "line 2: not a JSON record");
  CHECK(parse_error("\n# c\n{\"type\":\"wall\"}") == "line 3: unknown record type 'wall'");
  CHECK(parse_error("{\"type\":\"obstacle\",\"x\":1,\"radius\":3}") == "line 1: unknown key 'radius'");
  CHECK(parse_error("{\"type\":\"obstacle\",\"radius_cm\":-3}").rfind("line 1:", 0) == 0);
  CHECK(parse_error("{\"type\":\"world\",\"seed\":\"x\"}") == "line 1: bad value for 'seed'");
  CHECK(parse_error("{\"type\":\"world\",\"initial_state\":\"flying\"}").rfind("line 1: unknown initial_state", 0) == 0);
  CHECK(parse_error("[1,2]") == "line 1: record needs a string \"type\"");
  CHECK(parse_error("{\"type\":\"controller\",\"grow_timeout_s\":0}").rfind("line 1:", 0) == 0);
  CHECK(parse_error("{\"type\":\"touch\",\"force_n\":-1}").rfind("line 1:", 0) == 0);
}

TEST_CASE("shipped scenarios load") {
  for (const char* name : {"empty", "small_object", "large_object"}) {
    const auto sc = load_scenario(std::string(VINESENSE_SCENARIO_DIR "/") + name + ".jsonl");
    CHECK(sc.name == name);
    CHECK(sc.duration_s > 0.0);
  }
  const auto large = load_scenario(VINESENSE_SCENARIO_DIR "/large_object.jsonl");
  REQUIRE(large.setup.obstacles.size() == 1);
  CHECK(2.0 * large.setup.obstacles[0].radius_cm > large.setup.sim.steering.min_wrap_diameter_cm());
  const auto small = load_scenario(VINESENSE_SCENARIO_DIR "/small_object.jsonl");
  CHECK(2.0 * small.setup.obstacles[0].radius_cm < small.setup.sim.steering.min_wrap_diameter_cm());
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.jsonl"), Error);
}
