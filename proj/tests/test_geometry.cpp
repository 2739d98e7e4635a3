#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uvscatter/geometry.hpp"

#include "oracles.hpp"

using namespace uvscatter;
namespace geo = uvscatter::geometry;
using geo::LinkGeometry;
using geo::ScatterPoint;
using geo::Vec3;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double deg = kPi / 180.0;

LinkGeometry random_geometry(oracle::Rng& rng) {
  LinkGeometry g;
  g.range_m = rng.uniform(10.0, 300.0);
  g.tx_inclination_rad = rng.uniform(0.0, kPi);
  g.tx_azimuth_rad = rng.uniform(-kPi, kPi);
  g.rx_inclination_rad = rng.uniform(0.0, kPi);
  g.rx_azimuth_rad = rng.uniform(-kPi, kPi);
  g.beam_full_angle_rad = rng.uniform(0.05, kPi);
  g.fov_full_angle_rad = rng.uniform(0.05, kPi);
  return g;
}

ScatterPoint random_point(oracle::Rng& rng, double scale) {
  return {rng.uniform(0.0, kPi), rng.uniform(-kPi, kPi), rng.uniform(0.01, 3.0 * scale)};
}
}  // namespace

TEST_CASE("r1_norm special cases") {
  const double r = 73.0;
  // Scatter point on the Tx itself.
  CHECK(geo::r1_norm({kPi / 2, kPi / 2, r}, r) == doctest::Approx(0.0).epsilon(1e-12));
  // Antipodal colinear point.
  CHECK(geo::r1_norm({kPi / 2, -kPi / 2, r}, r) == doctest::Approx(2.0 * r).epsilon(1e-12));
  // theta = 0: the cross term vanishes.
  for (double phi : {-1.0, 0.0, 2.0}) {
    CHECK(geo::r1_norm({0.0, phi, 5.0}, r) == doctest::Approx(std::hypot(5.0, r)).epsilon(1e-12));
  }
}

TEST_CASE("r1_norm triangle inequality and vector oracle") {
  oracle::Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double r = rng.uniform(1.0, 200.0);
    const ScatterPoint p = random_point(rng, r);
    const double r1 = geo::r1_norm(p, r);
    CHECK(r1 >= std::abs(p.r2_m - r) - 1e-9);
    CHECK(r1 <= p.r2_m + r + 1e-9);
    const double vec = geo::norm(p.position() - Vec3{0.0, r, 0.0});
    CHECK(r1 == doctest::Approx(vec).epsilon(1e-12));
  }
}

TEST_CASE("angle formulas agree with the vector-angle oracle") {
  oracle::Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const LinkGeometry g = random_geometry(rng);
    const ScatterPoint p = random_point(rng, g.range_m);
    const Vec3 r1 = p.position() - g.tx_position();
    if (geo::norm(r1) < 1e-9 || p.r2_m < 1e-9) continue;

    CHECK(geo::angle_gamma_t(p, g) ==
          doctest::Approx(geo::angle_between(g.tx_direction(), r1)).epsilon(1e-9));
    CHECK(geo::angle_zeta(p, g) ==
          doctest::Approx(geo::angle_between(g.rx_direction(), p.position())).epsilon(1e-9));
    CHECK(geo::angle_theta_s(p, g) ==
          doctest::Approx(geo::angle_between(r1, -p.position())).epsilon(1e-9));
  }
}

TEST_CASE("angle special cases") {
  LinkGeometry g;
  g.range_m = 100.0;
  g.tx_inclination_rad = 40.0 * deg;
  g.tx_azimuth_rad = -90.0 * deg;
  g.rx_inclination_rad = 60.0 * deg;
  g.rx_azimuth_rad = 90.0 * deg;
  g.beam_full_angle_rad = 60.0 * deg;
  g.fov_full_angle_rad = 30.0 * deg;

  SUBCASE("gamma_t on and against the beam axis") {
    // acos conditioning caps the attainable accuracy at the endpoints.
    const ScatterPoint on = geo::spherical_from_position(g.tx_position() + g.tx_direction());
    CHECK(geo::angle_gamma_t(on, g) < 1e-6);
    const ScatterPoint off =
        geo::spherical_from_position(g.tx_position() - 2.0 * g.tx_direction());
    CHECK(kPi - geo::angle_gamma_t(off, g) < 1e-6);
  }

  SUBCASE("zeta on the FOV axis and orthogonal") {
    CHECK(geo::angle_zeta({g.rx_inclination_rad, g.rx_azimuth_rad, 5.0}, g) ==
          doctest::Approx(0.0).epsilon(1e-12));
    LinkGeometry pole = g;
    pole.rx_inclination_rad = 0.0;
    CHECK(geo::angle_zeta({kPi / 2, 1.0, 5.0}, pole) ==
          doctest::Approx(kPi / 2).epsilon(1e-12));
  }

  SUBCASE("theta_s for the antipodal and polar rays") {
    const double r = g.range_m;
    CHECK(geo::angle_theta_s({kPi / 2, -kPi / 2, r}, g) == doctest::Approx(kPi).epsilon(1e-9));
    const double r2 = 42.0;
    CHECK(std::cos(geo::angle_theta_s({0.0, 0.3, r2}, g)) ==
          doctest::Approx(-r2 / std::hypot(r2, r)).epsilon(1e-12));
  }

  SUBCASE("degenerate points throw") {
    CHECK_THROWS_AS(geo::angle_gamma_t({kPi / 2, kPi / 2, g.range_m}, g),
                    geo::DegenerateGeometryError);
    CHECK_THROWS_AS(geo::angle_zeta({1.0, 1.0, 0.0}, g), geo::DegenerateGeometryError);
    CHECK_THROWS_AS(geo::angle_theta_s({1.0, 1.0, 0.0}, g), geo::DegenerateGeometryError);
  }
}

TEST_CASE("direction vectors from angles are unit length") {
  oracle::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const LinkGeometry g = random_geometry(rng);
    CHECK(geo::norm(g.tx_direction()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geo::norm(g.rx_direction()) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("link geometry validation") {
  LinkGeometry g{100.0, 1.0, 0.5, 1.0, -0.5, 1.0, 0.5};
  CHECK_NOTHROW(g.validate());
  LinkGeometry bad = g;
  bad.range_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.beam_full_angle_rad = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.fov_full_angle_rad = kPi + 0.01;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.tx_inclination_rad = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.rx_azimuth_rad = 3.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("fov bounds: pole-centred and equatorial cones") {
  LinkGeometry g{100.0, 0.0, 0.0, 0.0, 0.0, 1.0, 60.0 * deg};
  auto [tmin, tmax] = geo::fov_theta_range(g);
  CHECK(tmin == doctest::Approx(0.0));
  CHECK(tmax == doctest::Approx(30.0 * deg));
  auto [plo, phi] = geo::fov_phi_bounds(g, 10.0 * deg);
  CHECK(phi - plo == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  g.rx_inclination_rad = 90.0 * deg;
  g.rx_azimuth_rad = 90.0 * deg;
  g.fov_full_angle_rad = 30.0 * deg;
  std::tie(tmin, tmax) = geo::fov_theta_range(g);
  CHECK(tmin == doctest::Approx(75.0 * deg));
  CHECK(tmax == doctest::Approx(105.0 * deg));
  std::tie(plo, phi) = geo::fov_phi_bounds(g, 90.0 * deg);
  CHECK(plo == doctest::Approx(75.0 * deg).epsilon(1e-9));
  CHECK(phi == doctest::Approx(105.0 * deg).epsilon(1e-9));
}

TEST_CASE("fov bounds contain every direction inside the cone") {
  oracle::Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const LinkGeometry g = random_geometry(rng);
    const auto [tmin, tmax] = geo::fov_theta_range(g);
    const double cos_half = std::cos(0.5 * g.fov_full_angle_rad);
    int found = 0;
    for (int i = 0; i < 5000 || found < 50; ++i) {
      if (i > 200000) break;
      // Uniform direction on the sphere.
      const double ct = rng.uniform(-1.0, 1.0);
      const double ph = rng.uniform(-kPi, kPi);
      const Vec3 u = geo::rotate_about({0.0, 0.0, 1.0}, ct, ph);
      if (geo::dot(u, g.rx_direction()) < cos_half) continue;
      ++found;
      const ScatterPoint p = geo::spherical_from_position(u);
      CHECK(p.theta_rad >= tmin - 1e-9);
      CHECK(p.theta_rad <= tmax + 1e-9);
      const auto [plo, phi] = geo::fov_phi_bounds(g, p.theta_rad);
      // Compare azimuths on the circle.
      double dphi = std::remainder(p.phi_rad - 0.5 * (plo + phi), 2.0 * kPi);
      CHECK(std::abs(dphi) <= 0.5 * (phi - plo) + 1e-9);
    }
  }
}

TEST_CASE("fov phi bounds are tight: the edge sits on the cone") {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const LinkGeometry g = random_geometry(rng);
    const auto [tmin, tmax] = geo::fov_theta_range(g);
    const double theta = rng.uniform(tmin, tmax);
    const auto [plo, phi] = geo::fov_phi_bounds(g, theta);
    const double width = 0.5 * (phi - plo);
    if (width <= 1e-9 || width >= kPi - 1e-9) continue;
    const ScatterPoint edge{theta, plo, 1.0};
    CHECK(geo::angle_zeta(edge, g) ==
          doctest::Approx(0.5 * g.fov_full_angle_rad).epsilon(1e-9));
  }
}

TEST_CASE("beam radial bounds, uniform cone") {
  LinkGeometry g{100.0, 60.0 * deg, -90.0 * deg, 60.0 * deg, 90.0 * deg, 60.0 * deg,
                 30.0 * deg};

  SUBCASE("ray through the beam axis: endpoints are cone roots") {
    // A point on the beam axis, converted to a ray from the origin.
    const ScatterPoint axis =
        geo::spherical_from_position(g.tx_position() + 50.0 * g.tx_direction());
    const auto iv =
        geo::beam_r2_bounds(axis.theta_rad, axis.phi_rad, g, emission::Kind::uniform_cone, 1e4);
    REQUIRE(!iv.empty());
    const double khalf = std::cos(0.5 * g.beam_full_angle_rad);
    for (double end : {iv.lo, iv.hi}) {
      if (end <= 0.0 || end >= 1e4) continue;
      const double cg = std::cos(geo::angle_gamma_t({axis.theta_rad, axis.phi_rad, end}, g));
      CHECK(std::abs(cg - khalf) <= 1e-8);
    }
    // Interior points are inside the cone, nearby exterior points are not.
    const double mid = 0.5 * (iv.lo + iv.hi);
    CHECK(geo::angle_gamma_t({axis.theta_rad, axis.phi_rad, mid}, g) <=
          0.5 * g.beam_full_angle_rad);
  }

  SUBCASE("ray pointing away from the beam: empty") {
    // Narrow the beam so the origin is strictly outside it, then walk a
    // ray that recedes from the beam axis.
    LinkGeometry narrow = g;
    narrow.beam_full_angle_rad = 40.0 * deg;
    const auto iv = geo::beam_r2_bounds(kPi, 0.0, narrow, emission::Kind::uniform_cone, 1e4);
    CHECK(iv.empty());
  }
}

TEST_CASE("beam radial bounds agree with a dense scan") {
  oracle::Rng rng(31);
  const double trunc = 500.0;
  for (int trial = 0; trial < 300; ++trial) {
    const LinkGeometry g = random_geometry(rng);
    const double theta = rng.uniform(0.0, kPi);
    const double phi = rng.uniform(-kPi, kPi);
    for (auto kind : {emission::Kind::uniform_cone, emission::Kind::lambertian}) {
      const auto iv = geo::beam_r2_bounds(theta, phi, g, kind, trunc);
      const double half = kind == emission::Kind::uniform_cone ? 0.5 * g.beam_full_angle_rad
                                                               : 0.5 * kPi;
      for (int i = 0; i < 400; ++i) {
        const double r2 = trunc * (i + 0.5) / 400.0;
        const ScatterPoint p{theta, phi, r2};
        if (geo::r1_norm(p, g.range_m) < 1e-9) continue;
        const bool inside_cone = geo::angle_gamma_t(p, g) <= half;
        const bool inside_iv = !iv.empty() && r2 >= iv.lo && r2 <= iv.hi;
        // Skip the immediate neighbourhood of the interval endpoints.
        if (!iv.empty() &&
            (std::abs(r2 - iv.lo) < 1e-6 * trunc || std::abs(r2 - iv.hi) < 1e-6 * trunc))
          continue;
        CHECK(inside_cone == inside_iv);
      }
    }
  }
}

TEST_CASE("lambertian radial bounds: hemisphere support") {
  // Tx pointing straight up; rays below its horizontal plane never enter.
  LinkGeometry g{50.0, 0.0, 0.0, 60.0 * deg, 90.0 * deg, 60.0 * deg, 30.0 * deg};
  const auto iv = geo::beam_r2_bounds(3.0 * kPi / 4.0, 0.3, g, emission::Kind::lambertian, 1e4);
  CHECK(iv.empty());
}

TEST_CASE("integration domain honours the indicators") {
  oracle::Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const LinkGeometry g = random_geometry(rng);
    for (auto kind : {emission::Kind::uniform_cone, emission::Kind::lambertian}) {
      const auto dom = geo::make_integration_domain(g, kind, 400.0);
      if (dom.empty()) continue;
      for (int i = 0; i < 200; ++i) {
        const double theta = rng.uniform(dom.theta_min, dom.theta_max);
        const auto [plo, phi] = dom.phi_bounds(theta);
        if (!(phi > plo)) continue;
        const double ph = rng.uniform(plo, phi);
        const auto iv = dom.r2_bounds(theta, ph);
        if (iv.empty()) continue;
        const double r2 = rng.uniform(iv.lo + 1e-7 * (iv.hi - iv.lo),
                                      iv.hi - 1e-7 * (iv.hi - iv.lo));
        const ScatterPoint p{theta, ph, r2};
        CHECK(geo::angle_zeta(p, g) <= 0.5 * g.fov_full_angle_rad + 1e-7);
        REQUIRE(iv.lo >= 0.0);
        REQUIRE(iv.lo <= iv.hi);
        if (geo::r1_norm(p, g.range_m) < 1e-9) continue;
        const double half =
            kind == emission::Kind::uniform_cone ? 0.5 * g.beam_full_angle_rad : 0.5 * kPi;
        CHECK(geo::angle_gamma_t(p, g) <= half + 1e-6);
      }
    }
  }
}
