#include "tmsm/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace tmsm;

namespace {
constexpr double kPi = std::numbers::pi;
const std::filesystem::path kFixtures = TMSM_FIXTURE_DIR;
const std::filesystem::path kData = TMSM_DATA_DIR;
}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numbers::pi}) {
    CHECK(parse_double(format_double(v)).value() == v);
  }
  CHECK_FALSE(parse_double("1.5x"));
  CHECK_FALSE(parse_double(""));
  CHECK_FALSE(parse_double("nan"));
  CHECK(parse_double(" +2.5 ").value() == 2.5);
}

TEST_CASE("lat/lon conversion") {
  CHECK(to_spherical(from_lat_lon_degrees(90.0, 123.0)).a == doctest::Approx(0.0));
  const UnitVec origin = from_lat_lon_degrees(0.0, 0.0);
  CHECK((origin.vec() - to_euclidean(Spherical{kPi / 2, 0.0}).vec()).norm() < 1e-15);
  const auto [lat, lon] = to_lat_lon_degrees(from_lat_lon_degrees(-33.9, -151.2));
  CHECK(lat == doctest::Approx(-33.9));
  CHECK(lon == doctest::Approx(-151.2));
}

TEST_CASE("dataset CSV round trip") {
  Dataset d;
  for (int i = 0; i < 50; ++i) d.points.push_back(to_euclidean(Spherical{0.05 * i + 0.01, 0.37 * i}));
  const auto path = std::filesystem::temp_directory_path() / "tmsm_roundtrip.csv";
  write_dataset_csv(path, d);
  const Dataset back = read_dataset_csv(path);
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK((back.points[i].vec() - d.points[i].vec()).norm() < 1e-12);

  write_dataset_csv(path, d, false);
  const Dataset chart_only = read_dataset_csv(path);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK((chart_only.points[i].vec() - d.points[i].vec()).norm() < 1e-12);
  std::filesystem::remove(path);
}

TEST_CASE("event ingestion") {
  const EventIngest e = ingest_events(kFixtures / "events_5.csv");
  CHECK(e.data.size() == 4);
  CHECK(e.skipped == 1);
  CHECK(e.records[2].id == "e4");
  CHECK(e.records[0].timestamp.value() == "2018-05-01T12:00:00Z");
  CHECK(e.records[0].lat == 35.2);
  CHECK_THROWS_AS(ingest_events(kFixtures / "events_nolon.csv"), DataError);
  CHECK(ingest_events(kFixtures / "events_empty.csv").data.empty());
  CHECK_THROWS_AS(ingest_events(kFixtures / "missing.csv"), DataError);

  std::istringstream out_of_range("lat,lon\n91,0\n10,181\n10,20\n");
  const EventIngest r = ingest_events(out_of_range);
  CHECK(r.data.size() == 1);
  CHECK(r.skipped == 2);
}

TEST_CASE("boundary CSV") {
  const Boundary usa = read_boundary_csv(kData / "usa_outline_approx.csv");
  CHECK(usa.vertices().size() >= 150);
  CHECK(usa.contains(from_lat_lon_degrees(39.8, -98.6)));  // Kansas
  CHECK(usa.contains(from_lat_lon_degrees(30.3, -97.7)));  // Austin
  CHECK_FALSE(usa.contains(from_lat_lon_degrees(28.0, -75.0)));
  CHECK_FALSE(usa.contains(from_lat_lon_degrees(19.4, -99.1)));  // Mexico City
  CHECK_FALSE(usa.contains(from_lat_lon_degrees(53.5, -113.5)));  // Edmonton

  const auto path = std::filesystem::temp_directory_path() / "tmsm_tri.csv";
  {
    std::ofstream out(path);
    out << "a_rad,b_rad\n1.0,0.0\n1.0,1.0\n0.5,0.5\n1.0,0.0\n";
  }
  CHECK(read_boundary_vertices(path).size() == 3);
  {
    std::ofstream out(path);
    out << "a_rad,b_rad\n1.0,0.0\n1.0,oops\n0.5,0.5\n";
  }
  CHECK_THROWS_AS(read_boundary_vertices(path), DataError);
  std::filesystem::remove(path);
}
