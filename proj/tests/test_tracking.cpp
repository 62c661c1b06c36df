#include <doctest.h>

#include <cmath>
#include <random>

#include "fiberseg/error.hpp"
#include "fiberseg/phantom.hpp"
#include "fiberseg/tracking.hpp"

using namespace fiberseg;

namespace {

PlanarRegion square_region(const Vec3& origin, const Vec3& normal, const Vec3& u, const Vec3& v,
                           double half) {
  return {origin, normal, u, v, {{-half, -half}, {half, -half}, {half, half}, {-half, half}}};
}

// Straight tube along +x through the volume center.
std::pair<TensorVolume, BinaryMask> straight_tube(double radius = 4.0) {
  CurvedTubePhantomSpec spec;
  spec.control_points = {{0, 10, 10}, {15, 10, 10}, {30, 10, 10}};
  spec.tube_radius = radius;
  spec.geom.dims = {31, 21, 21};
  spec.geom.spacing = {1, 1, 1};
  spec.geom.origin = {0, 0, 0};
  return generate_curved_tube_phantom(spec);
}

}  // namespace

TEST_CASE("seed_points: 10x10 square at density 1") {
  const auto region = square_region({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}, 5.0);
  const auto seeds = seed_points(region, 1.0);
  CHECK(seeds.size() == 100);
  for (const auto& s : seeds) {
    CHECK(std::abs(s.x) < 5.0);
    CHECK(std::abs(s.y) < 5.0);
    CHECK(s.z == doctest::Approx(0.0));
  }
}

TEST_CASE("seed_points: triangle points satisfy point-in-polygon") {
  PlanarRegion region;
  region.origin = {1, 2, 3};
  region.normal = {0, 0, 1};
  region.basis_u = {1, 0, 0};
  region.basis_v = {0, 1, 0};
  region.polygon = {{0, 0}, {1, 0}, {0, 1}};
  const auto seeds = seed_points(region, 4.0);
  CHECK(!seeds.empty());
  for (const auto& s : seeds) {
    const double u = dot(s - region.origin, region.basis_u);
    const double v = dot(s - region.origin, region.basis_v);
    CHECK(region_contains_uv(region, u, v));
  }
}

TEST_CASE("seed_points: count tracks area * density (Monte-Carlo oracle)") {
  PlanarRegion region;
  region.origin = {0, 0, 0};
  region.normal = {0, 0, 1};
  region.basis_u = {1, 0, 0};
  region.basis_v = {0, 1, 0};
  region.polygon = {{0, 0}, {8, 0}, {8, 3}, {4, 6}, {0, 3}};
  const double density = 9.0;
  const auto seeds = seed_points(region, density);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(0.0, 8.0), uy(0.0, 6.0);
  int hits = 0;
  const int samples = 200000;
  for (int i = 0; i < samples; ++i) {
    if (region_contains_uv(region, ux(rng), uy(rng))) ++hits;
  }
  const double area = 48.0 * hits / samples;
  CHECK(std::abs(static_cast<double>(seeds.size()) - area * density) < 0.15 * area * density);
}

TEST_CASE("seed_points: degenerate polygon rejected") {
  PlanarRegion region;
  region.origin = {0, 0, 0};
  region.normal = {0, 0, 1};
  region.basis_u = {1, 0, 0};
  region.basis_v = {0, 1, 0};
  region.polygon = {{0, 0}, {1, 0}};
  CHECK_THROWS_AS(seed_points(region, 1.0), InvalidRegionError);
}

TEST_CASE("track_fiber: straight tube gives a collinear streamline") {
  auto [vol, mask] = straight_tube();
  TrackingParams params;
  const Streamline fiber = track_fiber(vol, {15, 10, 10}, params);
  REQUIRE(fiber.points.size() > 10);
  for (const auto& p : fiber.points) {
    CHECK(std::abs(p.y - 10.0) < 1e-6);
    CHECK(std::abs(p.z - 10.0) < 1e-6);
  }
}

TEST_CASE("track_fiber: torus seed stays near the center circle") {
  TorusPhantomSpec spec;
  spec.geom.dims = {57, 57, 17};
  spec.geom.spacing = {1, 1, 1};
  spec.geom.origin = {-8, -8, -8};
  auto [vol, mask] = generate_torus_phantom(spec);

  TrackingParams params;
  const Vec3 seed = {40.0 / std::sqrt(2.0), 40.0 / std::sqrt(2.0), 0.0};
  const Streamline fiber = track_fiber(vol, seed, params);
  REQUIRE(fiber.points.size() > 20);
  double max_dev = 0.0;
  for (const auto& p : fiber.points) {
    max_dev = std::max(max_dev, torus_distance_to_center_circle(spec, p));
  }
  CHECK(max_dev <= 2.0 * params.step_size);
}

TEST_CASE("track_fiber: isotropic background yields an empty streamline") {
  auto [vol, mask] = straight_tube();
  TrackingParams params;
  const Streamline fiber = track_fiber(vol, {15, 2, 2}, params);
  CHECK(fiber.empty());
}

TEST_CASE("track_fiber: out-of-bounds seed rejected") {
  auto [vol, mask] = straight_tube();
  CHECK_THROWS_AS(track_fiber(vol, {-50, 0, 0}, TrackingParams{}), OutOfBoundsError);
}

TEST_CASE("restrict_and_crop: crossing fibers kept, cropped and oriented") {
  const auto a = square_region({10, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 5.0);
  const auto b = square_region({20, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 5.0);

  Streamline through;  // passes both planes, oriented b -> a
  for (int i = 0; i <= 30; ++i) through.points.push_back({30.0 - i, 10.0, 10.0});
  Streamline one_only;
  for (int i = 0; i <= 30; ++i) one_only.points.push_back({i * 0.2, 10.0, 10.0});
  Streamline outside_polygon;  // crosses both planes but 8mm off-center
  for (int i = 0; i <= 30; ++i) outside_polygon.points.push_back({i * 1.0, 18.0, 10.0});

  const auto kept = restrict_and_crop({through, one_only, outside_polygon}, a, b);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].points.front().x == doctest::Approx(10.0));  // starts on plane a
  CHECK(kept[0].points.back().x == doctest::Approx(20.0));   // ends on plane b
  for (std::size_t i = 0; i + 1 < kept[0].points.size(); ++i) {
    CHECK(kept[0].points[i + 1].x > kept[0].points[i].x);  // oriented a -> b
  }
}

TEST_CASE("restrict_and_crop: empty survivor set raises") {
  const auto a = square_region({10, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 5.0);
  const auto b = square_region({20, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 5.0);
  Streamline miss;
  miss.points = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(restrict_and_crop({miss}, a, b), EmptyBundleError);
}
