#include <doctest.h>

#include "conewalk/config.hpp"

using namespace conewalk;
using namespace conewalk::config;

namespace {

const char* kSample = R"(
[run]
seed = 42
out = results
workers = 2

[model]
cone = orthant(2)
steps = gaussian(2)
whiten = true
lattice_basis = [(1,0);(0,1)]

[tail]
x = (3,3)
horizons = 64..1024 x4
paths = 100000
slope_tol = 0.1
)";

}  // namespace

TEST_CASE("parse and typed access") {
  Config cfg = Config::parse(kSample);
  CHECK(cfg.get_int("run", "seed") == 42);
  CHECK(cfg.get_string("run", "out") == "results");
  CHECK(cfg.get_bool("model", "whiten", false));
  Vec x = cfg.get_point("tail", "x");
  CHECK(x == Vec{3.0, 3.0});
  auto horizons = cfg.get_int_list("tail", "horizons");
  CHECK(horizons == std::vector<int64_t>{64, 256, 1024});
  CHECK(cfg.get_double("tail", "slope_tol") == doctest::Approx(0.1));
  auto basis = cfg.get_point_list("model", "lattice_basis");
  REQUIRE(basis.size() == 2);
  CHECK(basis[1] == Vec{0.0, 1.0});
  CHECK(cfg.get_int("run", "block_size", 8192) == 8192);  // default
}

TEST_CASE("round trip is the identity") {
  Config cfg = Config::parse(kSample);
  std::string once = cfg.serialize();
  Config again = Config::parse(once);
  CHECK(again.serialize() == once);
  CHECK(again.hash() == cfg.hash());
}

TEST_CASE("errors carry the section and field") {
  Config cfg = Config::parse(kSample);
  CHECK_THROWS_WITH_AS(cfg.get_int("run", "missing"),
                       doctest::Contains("[run].missing"), config_error);
  CHECK_THROWS_WITH_AS(cfg.get_int("run", "out"), doctest::Contains("not an integer"),
                       config_error);
  CHECK_THROWS_AS(Config::parse("[run\nseed = 1\n"), config_error);
  CHECK_THROWS_AS(Config::parse("seed = 1\n"), config_error);
}

TEST_CASE("integer list grammar") {
  CHECK(parse_int_list("1,2,3") == std::vector<int64_t>{1, 2, 3});
  CHECK(parse_int_list("2..16 x2") == std::vector<int64_t>{2, 4, 8, 16});
  CHECK(parse_int_list("0..6 +3") == std::vector<int64_t>{0, 3, 6});
  CHECK_THROWS_AS(parse_int_list("2..16 x1"), config_error);
}

TEST_CASE("later keys override earlier ones") {
  Config cfg = Config::parse("[run]\nseed = 1\nseed = 2\n");
  CHECK(cfg.get_int("run", "seed") == 2);
}
