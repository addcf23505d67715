#include <doctest.h>

#include <set>

#include "gazenet/common.hpp"

using namespace gazenet;

TEST_SUITE("common") {
  TEST_CASE("derived seeds are stable and tag sensitive") {
    CHECK(derive_seed(1, {"a", "b"}) == derive_seed(1, {"a", "b"}));
    CHECK(derive_seed(1, {"a", "b"}) != derive_seed(1, {"b", "a"}));
    CHECK(derive_seed(1, {"ab"}) != derive_seed(1, {"a", "b"}));
    CHECK(derive_seed(1, {"a"}) != derive_seed(2, {"a"}));
  }

  TEST_CASE("rng mappings stay in range") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      CHECK(rng.index(7) < 7);
    }
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(rng.index(5));
    CHECK(seen.size() == 5);
  }

  TEST_CASE("rng normal has unit moments") {
    Rng rng(11);
    double s = 0, ss = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      s += z;
      ss += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(ss / n - 1.0) < 0.02);
  }

  TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  }

  TEST_CASE("format_double round-trips") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.index(20)) - 10.0);
      CHECK(parse_double(format_double(v), "x", 1) == v);
    }
    CHECK(format_double(0.5) == "0.5");
  }

  TEST_CASE("csv splitting and trimming") {
    const auto f = split_csv_line("a, b ,,c");
    REQUIRE(f.size() == 4);
    CHECK(trim(f[1]) == "b");
    CHECK(f[2].empty());
    CHECK_THROWS_AS(parse_int("1.5", "f", 3), ParseError);
    CHECK_THROWS_AS(parse_double("abc", "f", 3), ParseError);
  }
}
