#include "tmsm/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace tmsm {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::optional<std::size_t> first_column(const CsvTable& t, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (auto c = t.column(n)) return c;
  }
  return std::nullopt;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (!have_header) {
      t.header = split(s);
      have_header = true;
      continue;
    }
    t.rows.push_back(split(s));
    t.line_numbers.push_back(line_no);
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_csv(in);
}

std::optional<double> parse_double(const std::string& field) {
  const std::string s = trim(field);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

UnitVec from_lat_lon_degrees(double lat_deg, double lon_deg) {
  return to_euclidean(Spherical{std::numbers::pi / 2.0 - lat_deg * kDeg, lon_deg * kDeg});
}

std::pair<double, double> to_lat_lon_degrees(const UnitVec& x) {
  const Spherical z = to_spherical(x);
  double lon = z.b / kDeg;
  if (lon > 180.0) lon -= 360.0;
  return {90.0 - z.a / kDeg, lon};
}

void write_dataset_csv(std::ostream& out, const Dataset& data, bool with_embedding) {
  out << (with_embedding ? "a_rad,b_rad,x1,x2,x3\n" : "a_rad,b_rad\n");
  for (const UnitVec& x : data.points) {
    const Spherical z = to_spherical(x);
    out << format_double(z.a) << ',' << format_double(z.b);
    if (with_embedding) {
      out << ',' << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]);
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data, bool with_embedding) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_dataset_csv(out, data, with_embedding);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto x1 = t.column("x1"), x2 = t.column("x2"), x3 = t.column("x3");
  const auto a = t.column("a_rad"), b = t.column("b_rad");
  const auto lat = t.column("lat_deg"), lon = t.column("lon_deg");
  const bool euclid = x1 && x2 && x3;
  if (!euclid && !(a && b) && !(lat && lon)) {
    throw DataError(path.string() + ": expected columns x1,x2,x3 or a_rad,b_rad or lat_deg,lon_deg");
  }
  Dataset data;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto field = [&](std::size_t c) -> double {
      const auto v = c < row.size() ? parse_double(row[c]) : std::nullopt;
      if (!v) throw DataError(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": malformed value");
      return *v;
    };
    if (euclid) {
      data.points.emplace_back(field(*x1), field(*x2), field(*x3));
    } else if (a && b) {
      data.points.push_back(to_euclidean(Spherical{field(*a), field(*b)}));
    } else {
      data.points.push_back(from_lat_lon_degrees(field(*lat), field(*lon)));
    }
  }
  return data;
}

std::vector<UnitVec> read_boundary_vertices(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto lat = t.column("lat_deg"), lon = t.column("lon_deg");
  const auto a = t.column("a_rad"), b = t.column("b_rad");
  if (!(lat && lon) && !(a && b)) throw DataError(path.string() + ": expected columns lat_deg,lon_deg or a_rad,b_rad");
  std::vector<UnitVec> vertices;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto field = [&](std::size_t c) -> double {
      const auto v = c < row.size() ? parse_double(row[c]) : std::nullopt;
      if (!v) throw DataError(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": malformed vertex");
      return *v;
    };
    vertices.push_back(lat ? from_lat_lon_degrees(field(*lat), field(*lon))
                           : to_euclidean(Spherical{field(*a), field(*b)}));
  }
  // A repeated closing vertex is allowed; closure is implicit.
  if (vertices.size() > 1 && geodesic_angle(vertices.front(), vertices.back()) < 1e-12) vertices.pop_back();
  return vertices;
}

Boundary read_boundary_csv(const std::filesystem::path& path, std::size_t resolution) {
  try {
    return Boundary::polyline(read_boundary_vertices(path), resolution);
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

EventIngest ingest_events(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto lat = first_column(t, {"lat", "lat_deg", "latitude"});
  const auto lon = first_column(t, {"lon", "lon_deg", "longitude"});
  if (!lat || !lon) throw DataError("event file is missing latitude/longitude columns");
  const auto id = first_column(t, {"event_id", "id"});
  const auto ts = t.column("timestamp");

  EventIngest out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto la = *lat < row.size() ? parse_double(row[*lat]) : std::nullopt;
    const auto lo = *lon < row.size() ? parse_double(row[*lon]) : std::nullopt;
    if (!la || !lo || *la < -90.0 || *la > 90.0 || *lo < -180.0 || *lo > 180.0) {
      ++out.skipped;
      std::clog << "warning: skipping malformed event on line " << t.line_numbers[r] << '\n';
      continue;
    }
    GeoEventRecord rec;
    rec.id = id && *id < row.size() ? row[*id] : std::to_string(out.records.size());
    rec.lat = *la;
    rec.lon = *lo;
    if (ts && *ts < row.size() && !row[*ts].empty()) rec.timestamp = row[*ts];
    out.data.points.push_back(from_lat_lon_degrees(rec.lat, rec.lon));
    out.records.push_back(std::move(rec));
  }
  return out;
}

EventIngest ingest_events(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return ingest_events(in);
}

}  // namespace tmsm
