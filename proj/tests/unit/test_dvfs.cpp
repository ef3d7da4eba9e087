#include <doctest.h>

#include "dcsim/dvfs.hpp"
#include "dcsim/errors.hpp"

#include <cmath>
#include <random>

using namespace dcsim;

namespace {

ScalingPolicy policy(Governor g, double target = 1000.0) {
  ScalingPolicy p;
  p.f_min_mhz = 1000.0;
  p.f_max_mhz = 3000.0;
  p.target_mhz = target;
  p.governor = g;
  return p;
}

} // namespace

TEST_CASE("governor names round-trip") {
  for (auto g : {Governor::Performance, Governor::Powersave, Governor::Ondemand,
                 Governor::Conservative})
    CHECK(governor_from_string(to_string(g)) == g);
  CHECK_THROWS_AS(governor_from_string("turbo"), ConfigError);
}

TEST_CASE("performance and powersave pin the range ends") {
  CHECK(governor_propose(policy(Governor::Performance), 0.0) == 3000.0);
  CHECK(governor_propose(policy(Governor::Performance), 100.0) == 3000.0);
  CHECK(governor_propose(policy(Governor::Powersave), 100.0) == 1000.0);
}

TEST_CASE("ondemand interpolates below the threshold and jumps at it") {
  CHECK(governor_propose(policy(Governor::Ondemand), 50.0) == doctest::Approx(2000.0));
  CHECK(governor_propose(policy(Governor::Ondemand), 80.0) == 3000.0);
  CHECK(governor_propose(policy(Governor::Ondemand), 0.0) == doctest::Approx(1000.0));
}

TEST_CASE("ondemand is non-decreasing in load") {
  double prev = 0.0;
  for (int l = 0; l <= 100; ++l) {
    const double f = governor_propose(policy(Governor::Ondemand), l);
    CHECK(f >= prev);
    CHECK(f >= 1000.0);
    CHECK(f <= 3000.0);
    prev = f;
  }
}

TEST_CASE("conservative steps by 5% of f_max") {
  CHECK(governor_propose(policy(Governor::Conservative, 2000.0), 90.0) ==
        doctest::Approx(2150.0));
  // Hold inside [down, up).
  CHECK(governor_propose(policy(Governor::Conservative, 2000.0), 70.0) ==
        doctest::Approx(2000.0));
  // Step down below down_threshold, clamped at f_min.
  CHECK(governor_propose(policy(Governor::Conservative, 2000.0), 10.0) ==
        doctest::Approx(1850.0));
  CHECK(governor_propose(policy(Governor::Conservative, 1050.0), 10.0) == 1000.0);
  CHECK(governor_propose(policy(Governor::Conservative, 2950.0), 95.0) == 3000.0);
}

TEST_CASE("conservative change per call is bounded by the step") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> load(0.0, 100.0);
  auto p = policy(Governor::Conservative, 2000.0);
  for (int i = 0; i < 1000; ++i) {
    const double f = governor_propose(p, load(rng));
    CHECK(std::fabs(f - p.target_mhz) <= p.step_fraction * p.f_max_mhz + 1e-12);
    CHECK(f >= p.f_min_mhz);
    CHECK(f <= p.f_max_mhz);
    p.target_mhz = f;
  }
}

TEST_CASE("governor rejects load outside [0,100]") {
  CHECK_THROWS_AS(governor_propose(policy(Governor::Ondemand), -1.0), DomainError);
  CHECK_THROWS_AS(governor_propose(policy(Governor::Ondemand), 100.5), DomainError);
}

TEST_CASE("policy validation") {
  auto p = policy(Governor::Ondemand);
  p.f_min_mhz = 4000.0; // min above max
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = policy(Governor::Ondemand);
  p.up_threshold_pct = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("drive_pstate picks the ceiling match") {
  PStateDriver d;
  d.pstates = {{0, 3000, 1.2, 95}, {1, 2600, 1.1, 85}, {2, 2000, 1.0, 70},
               {3, 1200, 0.9, 50}};

  auto r = drive_pstate(d, 2100.0);
  CHECK(r.pstate.frequency_mhz == 2600.0);
  CHECK_FALSE(r.clamped);

  r = drive_pstate(d, 2000.0);
  CHECK(r.pstate.frequency_mhz == 2000.0);
  CHECK_FALSE(r.clamped);

  r = drive_pstate(d, 3200.0);
  CHECK(r.pstate.frequency_mhz == 3000.0);
  CHECK(r.clamped);

  r = drive_pstate(d, 800.0);
  CHECK(r.pstate.frequency_mhz == 1200.0);
  CHECK(r.clamped);

  PStateDriver empty;
  CHECK_THROWS_AS(drive_pstate(empty, 2000.0), ConfigError);
}

TEST_CASE("drive_pstate never under-provisions inside the table span") {
  PStateDriver d;
  d.pstates = {{0, 3000, 1.2, 95}, {1, 2600, 1.1, 85}, {2, 2000, 1.0, 70},
               {3, 1200, 0.9, 50}};
  for (double target = 1200.0; target <= 3000.0; target += 7.0) {
    auto r = drive_pstate(d, target);
    CHECK(r.pstate.frequency_mhz >= target);
    CHECK_FALSE(r.clamped);
  }
}
