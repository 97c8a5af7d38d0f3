#include <cmath>
#include <doctest.h>

#include "mabkit/rng.hpp"

using mabkit::Rng;

TEST_CASE("same seed reproduces the stream bit for bit") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(123), d(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(c.normal() == d.normal());
    CHECK(c.uniform01() == d.uniform01());
  }
}

TEST_CASE("derived streams are independent of each other") {
  Rng a = Rng::derive(7, 0);
  Rng b = Rng::derive(7, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
  // Derivation is counter-based: regenerating stream 1 gives the same values.
  Rng b2 = Rng::derive(7, 1);
  Rng b3 = Rng::derive(7, 1);
  CHECK(b2.next_u64() == b3.next_u64());
}

TEST_CASE("uniform01 stays in [0, 1)") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform_int respects its bound") {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    CHECK(rng.uniform_int(1) == 0);
    CHECK(rng.uniform_int(3) < 3);
  }
}

TEST_CASE("normal draws have standard moments") {
  Rng rng(42);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);
}
