#include <doctest.h>

#include <stdexcept>

#include "pivotrepr/config.hpp"

using namespace pivotrepr;

TEST_CASE("parse_string handles sections, comments, and whitespace") {
  const Config cfg = Config::parse_string(
      "# a comment\n"
      "top = hello\n"
      "\n"
      "[experiment]\n"
      "pivots = 100, 200, 300\n"
      "alpha = 0.05\n"
      "exact = true\n"
      "  seed =   42  \n"
      "[sgd]\n"
      "lr = 0.1\n");

  CHECK(cfg.has("top"));
  CHECK(cfg.get_string("top") == "hello");
  CHECK(cfg.get_int_list("experiment.pivots", {}) == std::vector<long>{100, 200, 300});
  CHECK(cfg.get_double("experiment.alpha", 0.0) == doctest::Approx(0.05));
  CHECK(cfg.get_bool("experiment.exact", false));
  CHECK(cfg.get_uint64("experiment.seed", 0) == 42);
  CHECK(cfg.get_double("sgd.lr", 0.0) == doctest::Approx(0.1));
  CHECK(!cfg.has("sgd.momentum"));
}

TEST_CASE("fallbacks and required keys") {
  const Config cfg = Config::parse_string("a = 1\n");
  CHECK(cfg.get_int("a", 9) == 1);
  CHECK(cfg.get_int("missing", 9) == 9);
  CHECK(cfg.get_string("missing", "d") == "d");
  CHECK(cfg.require_int("a") == 1);
  CHECK_THROWS_AS(cfg.require_int("missing"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_string("missing"), std::invalid_argument);
  CHECK(cfg.get_int_list("missing", {7}) == std::vector<long>{7});
}

TEST_CASE("string lists split on commas and trim") {
  const Config cfg = Config::parse_string("methods = ae_scl, scl_mi ,no_da\n");
  CHECK(cfg.get_string_list("methods") == std::vector<std::string>{"ae_scl", "scl_mi", "no_da"});
}

TEST_CASE("malformed lines and values raise errors") {
  CHECK_THROWS_AS(Config::parse_string("no equals sign\n"), std::invalid_argument);
  const Config cfg = Config::parse_string("x = notanumber\n");
  CHECK_THROWS_AS(cfg.get_int("x", 0), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_double("x", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_bool("x", false), std::invalid_argument);
  CHECK_THROWS_AS(Config::parse_file("/no/such/config.ini"), std::runtime_error);
}

TEST_CASE("later assignments win") {
  const Config cfg = Config::parse_string("k = 1\nk = 2\n");
  CHECK(cfg.get_int("k", 0) == 2);
}
