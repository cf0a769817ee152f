#pragma once

// Plain-text interchange: dataset, boundary and event CSV files.

#include "tmsm/boundary_scaling.hpp"
#include "tmsm/samplers.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmsm {

/// Malformed or inconsistent input data (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or flags (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Column index by name, or nullopt.
  std::optional<std::size_t> column(const std::string& name) const;
};

/// Comma separated, first non-empty line is the header, no quoting. Blank
/// lines and lines starting with '#' are skipped.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Strict numeric field parse; nullopt on garbage or trailing characters.
std::optional<double> parse_double(const std::string& field);

UnitVec from_lat_lon_degrees(double lat_deg, double lon_deg);
/// (lat, lon) in degrees, lon in (-180, 180].
std::pair<double, double> to_lat_lon_degrees(const UnitVec& x);

/// Columns a_rad,b_rad and, if with_embedding, x1,x2,x3.
void write_dataset_csv(std::ostream& out, const Dataset& data, bool with_embedding = true);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data, bool with_embedding = true);

/// Accepts x1,x2,x3 (preferred when present), a_rad,b_rad, or lat_deg,lon_deg.
/// Throws DataError on missing columns or malformed rows.
Dataset read_dataset_csv(const std::filesystem::path& path);

/// Boundary vertices from a `lat_deg,lon_deg` or `a_rad,b_rad` file; the
/// polygon is closed implicitly.
std::vector<UnitVec> read_boundary_vertices(const std::filesystem::path& path);
Boundary read_boundary_csv(const std::filesystem::path& path,
                           std::size_t resolution = Boundary::kDefaultResolution);

struct GeoEventRecord {
  std::string id;
  double lat{0.0};
  double lon{0.0};
  std::optional<std::string> timestamp;
};

struct EventIngest {
  Dataset data;
  std::vector<GeoEventRecord> records;
  std::size_t skipped{0};
};

/// Storm/event records with latitude and longitude in degrees. Recognized
/// columns: lat|lat_deg|latitude, lon|lon_deg|longitude, optional
/// id|event_id and timestamp. Missing coordinate columns throw DataError;
/// malformed rows are skipped, counted and reported on std::clog.
EventIngest ingest_events(std::istream& in);
EventIngest ingest_events(const std::filesystem::path& path);

}  // namespace tmsm
