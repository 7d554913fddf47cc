#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nev/core.hpp"

using namespace nev;

TEST_CASE("validate accepts in-range parameters") {
  ModelParams p;
  p.consumer.alpha = 0.5;
  p.esdg.delta = 0.2;
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("validate rejects alpha outside [0,1]") {
  ModelParams p;
  p.consumer.alpha = 1.2;
  try {
    validate(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].field == "consumer.alpha");
    CHECK(e.issues()[0].allowed == "[0, 1]");
    CHECK(e.issues()[0].value == 1.2);
  }
}

TEST_CASE("validate rejects delta = 1") {
  ModelParams p;
  p.esdg.delta = 1.0;
  try {
    validate(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].field == "esdg.delta");
    CHECK(e.issues()[0].allowed == "[0, 1)");
  }
}

TEST_CASE("validate reports every violation") {
  ModelParams p;
  p.consumer.alpha = -0.5;
  p.esdg.delta = 2.0;
  p.esdg.epsilon = -1.0;
  p.lambda = -3.0;
  try {
    validate(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == 4);
  }
}

TEST_CASE("validate rejects non-finite values") {
  ModelParams p;
  p.manufacturer.V1 = std::nan("");
  CHECK_THROWS_AS(validate(p), ValidationError);
  p.manufacturer.V1 = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate(p), ValidationError);
}

TEST_CASE("raw mode enforces table non-negativity, normalized mode does not") {
  ModelParams p;
  p.manufacturer.V1 = -1.0;
  p.raw = false;
  CHECK_NOTHROW(validate(p));
  p.raw = true;
  try {
    validate(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].field == "manufacturer.V1");
  }
}

TEST_CASE("validate is idempotent") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    ModelParams p = nevtest::random_params(rng);
    ModelParams once = validate(p);
    ModelParams twice = validate(once);
    CHECK(nevtest::same_fields(once, twice));
  }
}

TEST_CASE("game state bounds") {
  CHECK_NOTHROW(validate(GameState{0.0, 1.0, 0.0}));
  CHECK_THROWS_AS(validate(GameState{-0.1, 0.5, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(GameState{0.5, 1.1, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(GameState{0.5, 0.5, -1.0}), ValidationError);
}

TEST_CASE("field registry round-trips and rejects unknown paths") {
  ModelParams p;
  fields::set(p, "consumer.r", 6.0);
  CHECK(fields::get(p, "consumer.r") == 6.0);
  CHECK(p.consumer.r == 6.0);
  fields::set(p, "esdg.delta", 0.25);
  CHECK(p.esdg.delta == 0.25);
  fields::set(p, "lambda", 2.0);
  CHECK(p.lambda == 2.0);
  CHECK(!fields::exists("consumer.nope"));
  CHECK_THROWS_AS(fields::get(p, "consumer.nope"), std::invalid_argument);
  CHECK(fields::names().size() == 29);
}
