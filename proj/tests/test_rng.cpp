#include <doctest.h>

#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"

using coverimpact::Rng;

TEST_CASE("same seed reproduces every draw type") {
  Rng a(12345);
  Rng b(12345);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
    CHECK(a.gamma(2.5) == b.gamma(2.5));
    CHECK(a.below(97) == b.below(97));
  }
}

TEST_CASE("uniform stays in [0,1)") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("below respects the bound") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    CHECK(rng.below(13) < 13);
  }
  CHECK_THROWS_AS(rng.below(0), coverimpact::Error);
}

TEST_CASE("normal moments on a fixed seed") {
  Rng rng(2024);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("gamma moments match shape/scale for several shapes") {
  for (const double shape : {0.5, 1.0, 3.7, 40.0}) {
    Rng rng(99);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      sum += g;
      sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.03));
    CHECK(var == doctest::Approx(shape).epsilon(0.08));
  }
}

TEST_CASE("inverse gamma mean matches scale/(shape-1)") {
  Rng rng(3);
  const double shape = 5.0, scale = 8.0;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.inverse_gamma(shape, scale);
  CHECK(sum / n == doctest::Approx(scale / (shape - 1.0)).epsilon(0.02));
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;

  Rng a(5);
  Rng b(5);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);

  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(50);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
}
