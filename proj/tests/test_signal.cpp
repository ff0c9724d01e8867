#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fidelity/random.hpp"
#include "fidelity/signal.hpp"

using namespace fidelity;

TEST_CASE("angle wrapping lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  const std::vector<double> jumps{3.0, -3.0, 3.1, -3.1};
  const auto u = unwrap_angles(jumps);
  CHECK(u[1] == doctest::Approx(2 * kPi - 3.0));
  CHECK(u[2] == doctest::Approx(3.1));
  CHECK(u[3] == doctest::Approx(2 * kPi - 3.1));
}

TEST_CASE("summary statistics against hand values") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(v) == 5.0);
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(median(v) == 4.5);
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(percentile({1, 2, 3, 4, 5}, 90) == doctest::Approx(4.6));
  CHECK(percentile({1, 2, 3, 4, 5}, 0) == 1.0);
  CHECK(sample_sd(std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("moving average reproduces linear signals everywhere") {
  std::vector<double> line;
  for (int i = 0; i < 30; ++i) line.push_back(0.5 * i - 3.0);
  const auto out = moving_average(line, 4);
  for (std::size_t i = 0; i < line.size(); ++i) CHECK(out[i] == doctest::Approx(line[i]));
  CHECK(half_window_samples(0.1, 100) == 5);
}

TEST_CASE("central difference is exact on quadratics in the interior") {
  std::vector<double> q;
  const double dt = 0.01;
  for (int i = 0; i < 20; ++i) q.push_back(3.0 * (i * dt) * (i * dt));
  const auto d = central_difference(q, dt);
  for (int i = 1; i < 19; ++i) CHECK(d[i] == doctest::Approx(6.0 * i * dt));
}

TEST_CASE("prominence filters minor peaks") {
  const std::vector<double> v{0, 3, 2.8, 3.1, 0, 1, 0};
  const auto big = find_maxima(v, 1.5);
  REQUIRE(big.size() == 1);
  CHECK(big[0].index == 3);
  CHECK(find_maxima(v, 0.1).size() == 3);
  const std::vector<double> neg{0, -2, 0};
  const auto mins = find_minima(neg, 1.0);
  REQUIRE(mins.size() == 1);
  CHECK(mins[0].value == -2.0);
}

TEST_CASE("number formatting round-trips exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(i % 13) - 6);
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(100) == "100");
}

TEST_CASE("stream seeds depend on every key") {
  CHECK(stream_seed(1, {2, 3}) != stream_seed(1, {3, 2}));
  CHECK(stream_seed(1, {2, 3}) == stream_seed(1, {2, 3}));
  CHECK(stream_seed(1, {2}) != stream_seed(2, {2}));
}
