#include <gtest/gtest.h>

#include <random>

#include "checks_geo.hpp"
#include "test_support.hpp"
#include "tollgrid/geo/polyline.hpp"
#include "tollgrid/geo/zone.hpp"
#include "tollgrid/geo/zone_gen.hpp"
#include "tollgrid/geo/zone_index.hpp"

using namespace tollgrid;
using namespace tollgrid::geo;

namespace {

const std::vector<GeoPoint> kUnitSquare = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};

PollutionZone zone(std::string id, int level, std::vector<GeoPoint> ring) {
  return {std::move(id), std::move(ring), level};
}

}  // namespace

TEST(Haversine, Identity) { EXPECT_EQ(haversine_m({52.5, 13.4}, {52.5, 13.4}), 0.0); }

TEST(Haversine, MilliDegreeAtEquator) {
  const auto r = checks::haversine_example();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Haversine, SymmetricAndMatchesLawOfCosines) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-179, 179);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    EXPECT_DOUBLE_EQ(haversine_m(a, b), haversine_m(b, a));
    EXPECT_NEAR(haversine_m(a, b), oracle::great_circle_m(a, b), 1e-3);
  }
}

TEST(GeoPoint, ValidateRejectsOutOfRange) {
  EXPECT_THROW(validate({91, 0}), ContractError);
  EXPECT_THROW(validate({0, 181}), ContractError);
  EXPECT_THROW(validate({std::nan(""), 0}), ContractError);
  EXPECT_NO_THROW(validate({-90, 180}));
}

TEST(Polyline, DedupAndMinimumSize) {
  EXPECT_THROW(Polyline({{1, 1}, {1, 1}}), ContractError);
  EXPECT_THROW(Polyline({{1, 1}}), ContractError);
  Polyline pl({{0, 0}, {0, 0}, {0, 1}, {0, 1}, {0, 2}});
  EXPECT_EQ(pl.size(), 3u);
}

TEST(Polyline, LengthOfTwoLegs) {
  Polyline pl({{0, 0}, {0.001, 0}, {0.002, 0}});
  EXPECT_NEAR(polyline_length_m(pl), 2 * 6'371'000.0 * 0.001 * oracle::kPi / 180, 1e-9);
  EXPECT_NEAR(polyline_length_m(pl), 222.38, 0.02);
}

TEST(Polyline, LengthIsAdditive) {
  Polyline a({{52.5, 13.3}, {52.51, 13.31}}), b({{52.51, 13.31}, {52.52, 13.29}});
  Polyline ab({{52.5, 13.3}, {52.51, 13.31}, {52.52, 13.29}});
  EXPECT_NEAR(polyline_length_m(ab), polyline_length_m(a) + polyline_length_m(b), 1e-9);
}

TEST(PointInZone, SquareExamples) {
  EXPECT_TRUE(point_in_zone({0.5, 0.5}, kUnitSquare));
  EXPECT_FALSE(point_in_zone({2, 2}, kUnitSquare));
}

TEST(PointInZone, BoundaryCountsAsInside) {
  EXPECT_TRUE(point_in_zone({0, 0.5}, kUnitSquare));
  EXPECT_TRUE(point_in_zone({1, 1}, kUnitSquare));
  EXPECT_TRUE(on_boundary({0.5, 1}, kUnitSquare));
  EXPECT_FALSE(on_boundary({0.5, 0.5}, kUnitSquare));
}

TEST(PointInZone, ConcavePolygon) {
  // U shape opening north.
  const std::vector<GeoPoint> u = {{0, 0}, {0, 3}, {3, 3}, {3, 2}, {1, 2}, {1, 1}, {3, 1}, {3, 0}};
  EXPECT_TRUE(point_in_zone({0.5, 1.5}, u));
  EXPECT_FALSE(point_in_zone({2, 1.5}, u));
  EXPECT_TRUE(point_in_zone({2.5, 2.5}, u));
}

TEST(PointInZone, NeedsThreeVertices) {
  EXPECT_THROW(point_in_zone({0, 0}, std::vector<GeoPoint>{{0, 0}, {1, 1}}), ContractError);
}

TEST(PointInZone, AgreesWithWindingNumber) {
  const auto r = checks::pip_vs_winding(10'000);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Zones, ValidationRules) {
  EXPECT_THROW(validate_zone(zone("a", 0, kUnitSquare)), DataError);
  EXPECT_THROW(validate_zone(zone("a", 6, kUnitSquare)), DataError);
  EXPECT_THROW(validate_zone(zone("a", 1, {{0, 0}, {1, 1}})), DataError);
  // Bow tie is not simple.
  EXPECT_THROW(validate_zone(zone("a", 1, {{0, 0}, {1, 1}, {0, 1}, {1, 0}})), DataError);
  EXPECT_NO_THROW(validate_zone(zone("a", 1, kUnitSquare)));
}

TEST(Zones, OverlapRejectedSharedEdgeAllowed) {
  const auto a = zone("a", 1, kUnitSquare);
  const auto shared = zone("b", 2, {{0, 1}, {0, 2}, {1, 2}, {1, 1}});
  const auto overlapping = zone("c", 2, {{0.5, 0.5}, {0.5, 1.5}, {1.5, 1.5}, {1.5, 0.5}});
  const auto inner = zone("d", 2, {{0.2, 0.2}, {0.2, 0.4}, {0.4, 0.4}, {0.4, 0.2}});
  EXPECT_NO_THROW(validate_zones(std::vector{a, shared}));
  EXPECT_THROW(validate_zones(std::vector{a, overlapping}), DataError);
  EXPECT_THROW(validate_zones(std::vector{a, inner}), DataError);
  EXPECT_THROW(validate_zones(std::vector{a, zone("a", 2, shared.ring)}), DataError);
}

TEST(Zones, ParseDropsClosingVertexAndRoundTrips) {
  const auto zs = parse_zones(
      R"([{"zone_id":"z1","level":3,"ring":[[13.0,52.0],[13.1,52.0],[13.1,52.1],[13.0,52.1],[13.0,52.0]]}])");
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_EQ(zs[0].ring.size(), 4u);
  EXPECT_EQ(zs[0].ring[1].lon, 13.1);
  EXPECT_EQ(zs[0].ring[1].lat, 52.0);
  const auto again = parse_zones(zones_to_json(zs));
  EXPECT_EQ(again[0].ring, zs[0].ring);
  EXPECT_EQ(again[0].level, 3);
}

TEST(Zones, ParseErrors) {
  EXPECT_THROW(parse_zones("not json"), LoadError);
  EXPECT_THROW(parse_zones(R"([{"zone_id":"z","level":2}])"), LoadError);
  EXPECT_THROW(parse_zones(R"([{"zone_id":"z","level":9,"ring":[[0,0],[1,0],[1,1]]}])"), DataError);
}

TEST(Zones, FixturesLoad) {
  EXPECT_EQ(load_zones(testsupport::fixture("zones.json")).size(), 8u);
  EXPECT_GT(load_zones(testsupport::fixture("zones_tiled.json")).size(), 20u);
  EXPECT_THROW(load_zones("/nonexistent/zones.json"), LoadError);
}

TEST(ZoneGen, DeterministicAndDisjoint) {
  const BBox area{13.3, 52.5, 13.4, 52.56};
  const auto a = generate_rect_zones(area, 30, 9), b = generate_rect_zones(area, 30, 9);
  ASSERT_EQ(a.size(), 30u);
  EXPECT_EQ(zones_to_json(a), zones_to_json(b));
  EXPECT_NO_THROW(validate_zones(a));
}

TEST(ZoneIndex, EmptyIndex) {
  ZoneIndex index(std::vector<PollutionZone>{});
  EXPECT_TRUE(index.candidates({0, 0}, {1, 1}).empty());
}

TEST(ZoneIndex, FarLegHasNoCandidates) {
  std::vector<PollutionZone> zs = {zone("a", 1, {{52.5, 13.3}, {52.5, 13.31}, {52.51, 13.31}})};
  ZoneIndex index(zs);
  EXPECT_TRUE(index.candidates({48.0, 2.0}, {48.01, 2.01}).empty());
  EXPECT_EQ(index.candidate_ids({52.505, 13.305}, {52.506, 13.306}), std::vector<std::string>{"a"});
}

TEST(ZoneIndex, SupersetOfBoundingBoxScan) {
  const auto r = checks::index_superset(200, 1000);
  EXPECT_TRUE(r.ok) << r.detail;
}
