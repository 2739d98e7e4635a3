#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uvscatter/metrics.hpp"
#include "uvscatter/single_scatter.hpp"

#include "oracles.hpp"
#include "test_scenarios.hpp"

using namespace uvscatter;
namespace ss = uvscatter::single_scatter;
namespace geo = uvscatter::geometry;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double deg = kPi / 180.0;
const quad::Config kCfg{1e-5, 0.0, 1000000};
}  // namespace

TEST_CASE("trajectory time") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  const double r = s.geometry.range_m;
  const double c = s.light_speed;
  // The path through the Tx degenerates to the baseline.
  CHECK(ss::trajectory_time({kPi / 2, kPi / 2, r}, s) == doctest::Approx(r / c).epsilon(1e-12));
  // The antipodal point doubles r1.
  CHECK(ss::trajectory_time({kPi / 2, -kPi / 2, r}, s) ==
        doctest::Approx(3.0 * r / c).epsilon(1e-12));
}

TEST_CASE("trajectory time is monotone in r2 (Lemma-style brute force)") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  oracle::Rng rng(13);
  for (int i = 0; i < 10000; ++i) {
    const double theta = rng.uniform(0.0, kPi);
    const double phi = rng.uniform(-kPi, kPi);
    double a = rng.uniform(0.0, 400.0), b = rng.uniform(0.0, 400.0);
    if (a > b) std::swap(a, b);
    CHECK(ss::trajectory_time({theta, phi, a}, s) <=
          ss::trajectory_time({theta, phi, b}, s) + 1e-18);
  }
}

TEST_CASE("eq-8-style bracket bound") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  const double r = s.geometry.range_m;
  oracle::Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    const double theta = rng.uniform(0.0, kPi);
    const double phi = rng.uniform(-kPi, kPi);
    const double r2 = rng.uniform(0.0, 500.0);
    const double r1 = geo::r1_norm({theta, phi, r2}, r);
    if (r1 <= 0.0) continue;
    const double ratio = (r2 - r * std::sin(theta) * std::sin(phi)) / r1;
    CHECK(std::abs(ratio) <= 1.0 + 1e-12);
  }
}

TEST_CASE("r2_of_time closed form") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  const double r = s.geometry.range_m;
  const double c = s.light_speed;

  SUBCASE("vanishing cross term") {
    const double t = 2.5 * r / c;
    const double ct = c * t;
    CHECK(ss::r2_of_time(t, 0.0, 1.0, s) ==
          doctest::Approx((ct * ct - r * r) / (2.0 * ct)).epsilon(1e-12));
    CHECK(ss::r2_of_time(t, kPi / 2, 0.0, s) ==
          doctest::Approx((ct * ct - r * r) / (2.0 * ct)).epsilon(1e-12));
  }

  SUBCASE("limits of the closed form as ct -> r+") {
    const double t = r / c * (1.0 + 1e-9);
    // Along the antipodal ray the numerator vanishes first.
    CHECK(ss::r2_of_time(t, kPi / 2, -kPi / 2, s) < 1e-4);
    // Along the through-Tx ray numerator and denominator vanish together
    // and the solution tends to the Tx radius (ct + r)/2 -> r.
    CHECK(ss::r2_of_time(t, kPi / 2, kPi / 2, s) == doctest::Approx(r).epsilon(1e-6));
  }

  SUBCASE("domain error at and below the line-of-sight time") {
    CHECK_THROWS_AS(ss::r2_of_time(r / c, 0.3, 0.4, s), std::domain_error);
    CHECK_THROWS_AS(ss::r2_of_time(0.0, 0.3, 0.4, s), std::domain_error);
  }

  SUBCASE("defining-equation residual and inverse consistency") {
    oracle::Rng rng(29);
    for (int i = 0; i < 10000; ++i) {
      const double theta = rng.uniform(0.0, kPi);
      const double phi = rng.uniform(-kPi, kPi);
      const double t = rng.uniform(1.0001, 8.0) * r / c;
      const double r2 = ss::r2_of_time(t, theta, phi, s);
      REQUIRE(r2 >= 0.0);
      const double r1 = geo::r1_norm({theta, phi, r2}, r);
      CHECK(std::abs(r1 + r2 - s.light_speed * t) <= 1e-9 * s.light_speed * t);
      CHECK(ss::trajectory_time({theta, phi, r2}, s) == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("r2_of_time_derivative") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  const double r = s.geometry.range_m;
  const double c = s.light_speed;

  SUBCASE("large-time limit is c/2 when the cross term vanishes") {
    CHECK(ss::r2_of_time_derivative(1000.0 * r / c, 0.0, 1.0, s) ==
          doctest::Approx(c / 2.0).epsilon(1e-5));
  }

  SUBCASE("finite-difference oracle") {
    oracle::Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
      const double theta = rng.uniform(0.0, kPi);
      const double phi = rng.uniform(-kPi, kPi);
      const double t = rng.uniform(1.01, 6.0) * r / c;
      const double dt = 1e-9 * t;
      const double fd = oracle::central_diff(
          [&](double tt) { return ss::r2_of_time(tt, theta, phi, s); }, t, dt);
      CHECK(ss::r2_of_time_derivative(t, theta, phi, s) ==
            doctest::Approx(fd).epsilon(1e-6));
    }
  }

  SUBCASE("derivative always at least c/2") {
    oracle::Rng rng(37);
    for (int i = 0; i < 20000; ++i) {
      const double v = ss::r2_of_time_derivative(rng.uniform(1.001, 10.0) * r / c,
                                                 rng.uniform(0.0, kPi),
                                                 rng.uniform(-kPi, kPi), s);
      CHECK(v >= c / 2.0 * (1.0 - 1e-12));
    }
  }

  SUBCASE("forward-aligned geometry is near-singular") {
    // A ray grazing the Tx-Rx segment with ct barely above r puts the
    // solution next to the segment, where the scattering angle vanishes
    // and with it the derivative bracket (1 - cos theta_s).
    const double offset = 1e-6;
    const double u_y = std::cos(offset);
    const double t = r * (1.0 + (1.0 - u_y)) / c;  // solves r2(t) ~ r/2
    CHECK_THROWS_AS(ss::r2_of_time_derivative(t, kPi / 2, kPi / 2 - offset, s),
                    ss::NearSingularError);
  }
}

TEST_CASE("total energy basics") {
  SUBCASE("disjoint beam and FOV give zero") {
    auto s = test_scenarios::fig2(emission::Kind::uniform_cone);
    // Narrow cones pointing horizontally away from each other.
    s.geometry.tx_inclination_rad = 90.0 * deg;
    s.geometry.tx_azimuth_rad = 90.0 * deg;  // +y: away from the Rx
    s.geometry.rx_inclination_rad = 90.0 * deg;
    s.geometry.rx_azimuth_rad = -90.0 * deg;  // -y: away from the Tx
    s.geometry.beam_full_angle_rad = 10.0 * deg;
    s.geometry.fov_full_angle_rad = 10.0 * deg;
    s.emission = emission::Pattern::uniform_cone(s.geometry.beam_full_angle_rad);
    CHECK(ss::total_energy(s, kCfg) == 0.0);
  }

  SUBCASE("bounded by the transmitted energy and positive at the anchors") {
    for (auto kind : {emission::Kind::lambertian, emission::Kind::uniform_cone}) {
      const auto s = test_scenarios::fig2(kind);
      const double q = ss::total_energy(s, kCfg);
      CHECK(q > 0.0);
      CHECK(q < s.pulse_energy_j);
    }
  }

  SUBCASE("reference anchor: 60-degree lambertian link at 100 m") {
    const auto s = test_scenarios::fig2(emission::Kind::lambertian);
    const double pl = metrics::path_loss_db(ss::total_energy(s, kCfg), s.pulse_energy_j);
    CHECK(pl == doctest::Approx(106.0).epsilon(0.015));
  }
}

TEST_CASE("energy cdf") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  const double t_los = s.geometry.range_m / s.light_speed;

  CHECK(ss::energy_cdf(s, 0.0, kCfg) == 0.0);
  CHECK(ss::energy_cdf(s, t_los, kCfg) == 0.0);

  SUBCASE("monotone and saturating") {
    const double q = ss::total_energy(s, kCfg);
    double prev = 0.0;
    for (double f : {1.01, 1.05, 1.1, 1.3, 2.0, 4.0, 10.0}) {
      const double v = ss::energy_cdf(s, f * t_los, kCfg);
      CHECK(v >= prev - 1e-6 * q);
      prev = v;
    }
    CHECK(prev == doctest::Approx(q).epsilon(0.01));
  }
}

TEST_CASE("cir support and duality with the energy cdf") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);
  const double t_los = s.geometry.range_m / s.light_speed;

  CHECK(ss::cir(s, 0.5 * t_los, kCfg) == 0.0);
  CHECK(ss::cir(s, 0.999 * t_los, kCfg) == 0.0);
  CHECK(ss::cir(s, 1e3 * t_los, kCfg) == 0.0);

  SUBCASE("dF/dt equals A_r h(t) at interior times") {
    const quad::Config tight{1e-8, 0.0, 1000000};
    for (double f : {1.05, 1.2, 1.5}) {
      const double t = f * t_los;
      const double h = ss::cir(s, t, tight);
      REQUIRE(h > 0.0);
      const double dt = 2e-10;
      const double fd =
          (ss::energy_cdf(s, t + dt, tight) - ss::energy_cdf(s, t - dt, tight)) / (2.0 * dt);
      CHECK(fd / s.detector_area_m2 == doctest::Approx(h).epsilon(1e-3));
    }
  }
}

TEST_CASE("cir series") {
  const auto s = test_scenarios::fig2(emission::Kind::lambertian);

  SUBCASE("trapezoid integral of the series recovers the total energy") {
    const auto [t0, t1] = ss::default_time_window(s, kCfg);
    const auto series = ss::cir_series(s, t0, t1, 2048, kCfg);
    REQUIRE(series.t_s.size() == 2048);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < series.t_s.size(); ++i) {
      integral += 0.5 * (series.t_s[i + 1] - series.t_s[i]) *
                  (series.h_w_m2[i] + series.h_w_m2[i + 1]);
    }
    integral *= s.detector_area_m2;
    CHECK(integral == doctest::Approx(ss::total_energy(s, kCfg)).epsilon(0.01));
    for (double h : series.h_w_m2) CHECK(h >= 0.0);
  }

  SUBCASE("window with no support is all zero") {
    const double t_los = s.geometry.range_m / s.light_speed;
    const auto series = ss::cir_series(s, 0.1 * t_los, 0.9 * t_los, 64, kCfg);
    for (double h : series.h_w_m2) CHECK(h == 0.0);
  }

  SUBCASE("parallel kernel matches the serial reference bit for bit") {
    const auto [t0, t1] = ss::default_time_window(s, kCfg);
    const auto par = ss::cir_series(s, t0, t1, 96, kCfg);
    const auto ser = ss::cir_series_serial(s, t0, t1, 96, kCfg);
    REQUIRE(par.h_w_m2.size() == ser.h_w_m2.size());
    for (std::size_t i = 0; i < par.h_w_m2.size(); ++i) {
      CHECK(par.h_w_m2[i] == ser.h_w_m2[i]);
    }
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(ss::cir_series(s, 1e-6, 1e-6, 16, kCfg), std::invalid_argument);
    CHECK_THROWS_AS(ss::cir_series(s, 1e-6, 2e-6, 1, kCfg), std::invalid_argument);
  }
}

TEST_CASE("rise order versus range") {
  // The shorter link's impulse response rises earlier.
  const auto near = test_scenarios::fig2(emission::Kind::lambertian, 60.0);
  const auto far = test_scenarios::fig2(emission::Kind::lambertian, 120.0);
  const auto first_nonzero = [&](const ss::Scenario& s) {
    const auto [t0, t1] = ss::default_time_window(s, kCfg);
    const auto series = ss::cir_series(s, t0, t1, 512, kCfg);
    for (std::size_t i = 0; i < series.t_s.size(); ++i) {
      if (series.h_w_m2[i] > 0.0) return series.t_s[i];
    }
    return t1;
  };
  CHECK(first_nonzero(near) < first_nonzero(far));
}

TEST_CASE("scenario validation") {
  auto s = test_scenarios::fig2(emission::Kind::lambertian);
  CHECK_NOTHROW(s.validate());
  s.detector_area_m2 = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = test_scenarios::fig2(emission::Kind::lambertian);
  s.pulse_energy_j = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
