#include <doctest.h>

#include <random>

#include "cotscope/flow.hpp"
#include "oracles.hpp"

using namespace cotscope;

namespace {

std::vector<double> bin_oracle(const std::vector<double>& v, std::size_t bins) {
  std::vector<double> out;
  const std::size_t n = v.size();
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * n / bins, hi = (b + 1) * n / bins;
    double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    out.push_back(s / static_cast<double>(hi - lo));
  }
  return out;
}

}  // namespace

TEST_CASE("binning averages contiguous tokens") {
  const std::vector<double> v{.1, .1, .2, .2, .3, .3, .4, .4, .5, .5};
  const auto c = bin_flow(v, 5);
  REQUIRE(c.aae_values.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(c.aae_values[i] == doctest::Approx(0.1 * static_cast<double>(i + 1)));
  CHECK(c.step_positions.front() == 10.0);
  CHECK(c.step_positions.back() == 90.0);
  CHECK(c.bin_width == 2);
}

TEST_CASE("binning matches a brute-force loop") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t bins = 2 + rng() % 10;
    std::vector<double> v(bins + rng() % 60);
    for (auto& x : v) x = u(rng);
    const auto c = bin_flow(v, bins);
    const auto want = bin_oracle(v, bins);
    REQUIRE(c.aae_values.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(c.aae_values[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("short curves degrade to one bin per token") {
  const std::vector<double> v{0.3, 0.1, 0.2};
  const auto c = bin_flow(v, 20);
  CHECK(c.aae_values == v);
  CHECK_THROWS(bin_flow(v, 1));
  CHECK_THROWS(bin_flow(std::vector<double>{}, 4));
}

TEST_CASE("mif examples") {
  CHECK(mif(std::vector<double>{0.1, 0.3, 0.2}).mif == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mif(std::vector<double>{0.1, 0.3, 0.2}).mif ==
        doctest::Approx(oracle::spearman_vs_index({0.1, 0.3, 0.2})).epsilon(1e-15));
  CHECK(mif(std::vector<double>{1, 2, 3, 4}).mif == 1.0);
  CHECK(mif(std::vector<double>{4, 3, 2, 1}).mif == -1.0);
  const auto flat = mif(std::vector<double>{0.2, 0.2, 0.2});
  CHECK(flat.mif == 0.0);
  CHECK(flat.degenerate);
}

TEST_CASE("mif with ties matches rank-then-Pearson") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v(2 + rng() % 30);
    for (auto& x : v) x = static_cast<double>(rng() % 5);
    const auto r = mif(v);
    if (r.degenerate) continue;
    CHECK(r.mif == doctest::Approx(oracle::spearman_vs_index(v)).epsilon(1e-12));
  }
}

TEST_CASE("mif is invariant under strictly monotone transforms") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(3 + rng() % 20), w;
    for (auto& x : v) x = u(rng);
    for (double x : v) w.push_back(std::exp(3 * x) + 7);
    CHECK(mif(v).mif == mif(w).mif);
  }
}

TEST_CASE("average ranks") {
  const std::vector<double> v{3, 1, 3, 2};
  CHECK(average_ranks(v, false) == std::vector<double>{3.5, 1, 3.5, 2});
  CHECK(average_ranks(v, true) == std::vector<double>{1.5, 4, 1.5, 3});
}
