#include <doctest.h>

#include <random>

#include "rai/kernels.hpp"

using namespace rai::kernels;

namespace {

struct Data {
  std::vector<std::uint8_t> y, p;
  std::vector<std::int32_t> g, c;
  std::vector<double> s;
};

// Large enough to cross the parallel cut-over.
Data make(std::size_t n, int groups, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.y.push_back(rng() & 1);
    d.p.push_back((rng() >> 3) & 1);
    d.g.push_back(std::int32_t(rng() % groups));
    d.c.push_back(std::int32_t(rng() % 7) - 1);  // includes -1
    d.s.push_back(double(rng() % 1001) / 1000.0);
  }
  return d;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("parallel confusion counts equal the serial reference") {
    for (std::size_t n : {std::size_t{10}, std::size_t{1} << 15, (std::size_t{1} << 16) + 3}) {
      const auto d = make(n, 4, n);
      const auto a = confusion_counts(d.y, d.p, d.g, 4);
      const auto b = confusion_counts_serial(d.y, d.p, d.g, 4);
      REQUIRE(a.size() == b.size());
      std::int64_t total = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].tp == b[k].tp);
        CHECK(a[k].fp == b[k].fp);
        CHECK(a[k].tn == b[k].tn);
        CHECK(a[k].fn == b[k].fn);
        total += a[k].tp + a[k].fp + a[k].tn + a[k].fn;
      }
      CHECK(total == std::int64_t(n));
    }
  }

  TEST_CASE("parallel contingency equals the serial reference") {
    const auto d = make((std::size_t{1} << 15) + 17, 3, 2);
    std::vector<std::int32_t> c(d.c.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = d.c[i] < 0 ? 6 : d.c[i];
    CHECK(contingency(d.g, 3, c, 7) == contingency_serial(d.g, 3, c, 7));
  }

  TEST_CASE("parallel threshold sweep equals the serial reference") {
    const auto d = make((std::size_t{1} << 15) + 1, 3, 3);
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
    const auto a = threshold_counts(d.s, d.y, d.g, 3, grid);
    const auto b = threshold_counts_serial(d.s, d.y, d.g, 3, grid);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fp);
    CHECK(a.positives == b.positives);
    CHECK(a.negatives == b.negatives);
  }
}
