#include "tmsm/bench.hpp"

#include "tmsm/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace tmsm {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename Enum, std::size_t N>
Enum lookup(const std::array<std::pair<const char*, Enum>, N>& table, const std::string& s, const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array<std::pair<const char*, Experiment>, 4> kExperiments{{
    {"vmf_known_kappa", Experiment::VmfKnownKappa},
    {"vmf_unknown_kappa", Experiment::VmfUnknownKappa},
    {"kent_known_shape", Experiment::KentKnownShape},
    {"storms", Experiment::Storms},
}};
constexpr std::array<std::pair<const char*, Method>, 4> kMethods{{
    {"tmsm_haversine", Method::TmsmHaversine},
    {"tmsm_projected", Method::TmsmProjected},
    {"truncsm", Method::TruncSM},
    {"mle", Method::Mle},
}};
constexpr std::array<std::pair<const char*, GKind>, 3> kGKinds{{
    {"haversine", GKind::Haversine},
    {"projected", GKind::Projected},
    {"unit", GKind::Unit},
}};
constexpr std::array<std::pair<const char*, ModelKind>, 3> kModelKinds{{
    {"vmf_mu_only", ModelKind::VmfMuOnly},
    {"vmf_mu_kappa", ModelKind::VmfMuKappa},
    {"kent_frame", ModelKind::KentFrame},
}};

template <typename Enum, std::size_t N>
std::string name_of(const std::array<std::pair<const char*, Enum>, N>& table, Enum e) {
  for (const auto& [name, value] : table) {
    if (value == e) return name;
  }
  return "?";
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

ScalingFunction scaling_for(Method m, const ExperimentConfig& config, const Boundary& boundary) {
  if (m == Method::TmsmHaversine) return ScalingFunction::haversine();
  return ScalingFunction::projected(config.drop_axis.value_or(default_drop_axis(boundary)));
}

ModelKind model_kind_for(Experiment e) {
  switch (e) {
    case Experiment::VmfKnownKappa: return ModelKind::VmfMuOnly;
    case Experiment::KentKnownShape: return ModelKind::KentFrame;
    default: return ModelKind::VmfMuKappa;
  }
}

std::vector<Method> active_methods(const ExperimentConfig& config) {
  std::vector<Method> out;
  for (Method m : config.methods) {
    if (config.g_kind == GKind::Haversine && m == Method::TmsmProjected) continue;
    if (config.g_kind == GKind::Projected && m == Method::TmsmHaversine) continue;
    out.push_back(m);
  }
  return out;
}

bool estimates_kappa(Experiment e) { return e == Experiment::VmfUnknownKappa || e == Experiment::Storms; }

}  // namespace

std::string to_string(Experiment e) { return name_of(kExperiments, e); }
std::string to_string(Method m) { return name_of(kMethods, m); }
std::string to_string(GKind g) { return name_of(kGKinds, g); }
Experiment parse_experiment(const std::string& s) { return lookup(kExperiments, s, "experiment"); }
Method parse_method(const std::string& s) { return lookup(kMethods, s, "method"); }
GKind parse_g_kind(const std::string& s) { return lookup(kGKinds, s, "g kind"); }
ModelKind parse_model_kind(const std::string& s) { return lookup(kModelKinds, s, "model kind"); }

std::optional<Boundary> BoundarySpec::build() const {
  try {
    if (type == "none") return std::nullopt;
    if (type == "colatitude") return Boundary::colatitude(a0, side, resolution);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (type == "polyline") return read_boundary_csv(path, resolution);
  throw ConfigError("unknown boundary type '" + type + "'");
}

ModelParams<double> TruthSpec::model(Experiment experiment) const {
  try {
    if (experiment == Experiment::KentKnownShape) return KentParams<double>(mu(), gamma1, kappa, alpha);
    return VmfParams<double>(mu(), kappa);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid truth: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("n_grid entries must be at least 2");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) throw ConfigError("n_grid must be strictly increasing");
  }
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (starts < 1) throw ConfigError("starts must be at least 1");
  if (g_kind == GKind::Unit) throw ConfigError("g=unit is not a valid benchmark scaling");
  if (drop_axis && (*drop_axis < 0 || *drop_axis > 2)) throw ConfigError("drop_axis must be 0, 1 or 2");
  if (experiment != Experiment::Storms) (void)truth.model(experiment);
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") {
        c.experiment = parse_experiment(value.get<std::string>());
      } else if (key == "n_grid") {
        c.n_grid = value.get<std::vector<std::size_t>>();
      } else if (key == "replicates") {
        c.replicates = value.get<std::size_t>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "g") {
        if (!value.is_null()) c.g_kind = parse_g_kind(value.get<std::string>());
      } else if (key == "methods") {
        c.methods.clear();
        for (const auto& m : value) c.methods.push_back(parse_method(m.get<std::string>()));
      } else if (key == "out_dir") {
        c.out_dir = value.get<std::string>();
      } else if (key == "workers") {
        c.workers = value.get<std::size_t>();
      } else if (key == "timing") {
        c.timing = value.get<bool>();
      } else if (key == "starts") {
        c.starts = value.get<std::size_t>();
      } else if (key == "drop_axis") {
        if (!value.is_null()) c.drop_axis = value.get<int>();
      } else if (key == "boundary") {
        for (const auto& [bk, bv] : value.items()) {
          if (bk == "type") {
            c.boundary.type = bv.get<std::string>();
          } else if (bk == "a0") {
            c.boundary.a0 = bv.get<double>();
          } else if (bk == "side") {
            const auto s = bv.get<std::string>();
            if (s != "greater" && s != "less") throw ConfigError("boundary.side must be 'greater' or 'less'");
            c.boundary.side = s == "greater" ? Side::Greater : Side::Less;
          } else if (bk == "path") {
            c.boundary.path = bv.get<std::string>();
          } else if (bk == "resolution") {
            c.boundary.resolution = bv.get<std::size_t>();
          } else {
            throw ConfigError("unknown boundary key '" + bk + "'");
          }
        }
      } else if (key == "truth") {
        for (const auto& [tk, tv] : value.items()) {
          if (tk == "mu_a") {
            c.truth.mu_a = tv.get<double>();
          } else if (tk == "mu_b") {
            c.truth.mu_b = tv.get<double>();
          } else if (tk == "kappa") {
            c.truth.kappa = tv.get<double>();
          } else if (tk == "alpha") {
            c.truth.alpha = tv.get<double>();
          } else if (tk == "gamma1") {
            const auto g = tv.get<std::vector<double>>();
            if (g.size() != 3) throw ConfigError("truth.gamma1 must have three components");
            c.truth.gamma1 = Vector3d(g[0], g[1], g[2]);
          } else {
            throw ConfigError("unknown truth key '" + tk + "'");
          }
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  if (c.experiment == Experiment::KentKnownShape && !j.contains("truth")) {
    c.truth.kappa = 10.0;
    c.truth.alpha = 3.0;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t n, std::size_t replicate) {
  return derive_seed(master, (static_cast<std::uint64_t>(n) << 32) ^ replicate, "replicate");
}

std::vector<BenchmarkRow> run_replicate(const ExperimentConfig& config, const std::optional<Boundary>& region,
                                        std::size_t n, std::size_t replicate) {
  using clock = std::chrono::steady_clock;
  const std::uint64_t seed = replicate_seed(config.seed, n, replicate);
  const ModelParams<double> truth = config.truth.model(config.experiment);
  const UnitVec mu_true = mean_direction(truth);
  const bool with_kappa = estimates_kappa(config.experiment);

  std::vector<BenchmarkRow> rows;
  auto blank = [&](Method m) {
    BenchmarkRow r;
    r.method = m;
    r.n = n;
    r.replicate = replicate;
    r.seed = seed;
    return r;
  };

  Dataset data;
  try {
    SampleRequest req{truth, n, region, seed};
    data = sample_truncated(req).data;
  } catch (const std::exception& e) {
    for (Method m : active_methods(config)) {
      BenchmarkRow r = blank(m);
      r.status = sanitize(std::string("sampling failed: ") + e.what());
      rows.push_back(r);
    }
    return rows;
  }

  for (Method m : active_methods(config)) {
    BenchmarkRow r = blank(m);
    const auto start = clock::now();
    try {
      UnitVec mu_hat;
      std::optional<double> kappa_hat;
      switch (m) {
        case Method::TmsmHaversine:
        case Method::TmsmProjected: {
          if (!region) throw std::invalid_argument("TMSM needs a truncation boundary");
          const ScaledDataset scaled(data, *region, scaling_for(m, config, *region));
          std::optional<KnownShape> known;
          if (config.experiment == Experiment::VmfKnownKappa) known = KnownShape{config.truth.kappa, 0.0};
          if (config.experiment == Experiment::KentKnownShape) known = KnownShape{config.truth.kappa, config.truth.alpha};
          EstimateOptions opts;
          opts.starts = config.starts;
          const EstimationResult est =
              estimate(scaled, model_kind_for(config.experiment), known, derive_seed(seed, 0, "estimate"), opts);
          mu_hat = mean_direction(est.params);
          if (with_kappa) kappa_hat = concentration(est.params);
          break;
        }
        case Method::TruncSM: {
          if (!region || !region->is_colatitude() || region->side() != Side::Greater) {
            throw std::invalid_argument("truncsm supports colatitude boundaries with side=greater only");
          }
          const auto chart = to_chart(data);
          const MvnChartModel fit = truncsm_mvn(chart, ChartPolyline::hemisphere_chart(region->a0()), with_kappa,
                                                1.0 / config.truth.kappa);
          mu_hat = to_euclidean(Spherical{fit.mu_z[0], fit.mu_z[1]});
          if (with_kappa) kappa_hat = fit.kappa();
          break;
        }
        case Method::Mle: {
          const MleFit fit = mle_vmf(data, with_kappa, config.truth.kappa);
          mu_hat = fit.params.mu();
          if (with_kappa) kappa_hat = fit.params.kappa();
          break;
        }
      }
      r.mu_hat = mu_hat.vec();
      r.rmse_embedding = rmse_embedding(mu_hat, mu_true);
      r.geodesic_error_rad = geodesic_angle(mu_hat, mu_true);
      r.kappa_hat = kappa_hat;
      if (kappa_hat) r.kappa_error = std::abs(*kappa_hat - config.truth.kappa);
    } catch (const std::exception& e) {
      r.status = sanitize(std::string("error: ") + e.what());
    }
    if (config.timing) {
      r.wall_time_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    }
    rows.push_back(r);
  }
  return rows;
}

BenchmarkRun run_benchmark_rows(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment == Experiment::Storms) throw ConfigError("use the storms command for the storms experiment");
  if (active_methods(config).empty()) throw ConfigError("the g filter leaves no method to run");
  const std::optional<Boundary> region = config.boundary.build();

  struct Item {
    std::size_t n, replicate;
    std::vector<BenchmarkRow> rows;
  };
  std::vector<Item> items;
  for (std::size_t n : config.n_grid) {
    for (std::size_t r = 0; r < config.replicates; ++r) items.push_back({n, r, {}});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      items[i].rows = run_replicate(config, region, items[i].n, items[i].replicate);
    }
  };
  const std::size_t nthreads = std::min(config.workers, items.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  BenchmarkRun run;
  for (Method m : active_methods(config)) {
    for (const Item& item : items) {
      for (const BenchmarkRow& row : item.rows) {
        if (row.method == m) run.rows.push_back(row);
      }
    }
  }
  return run;
}

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows) {
  out << kBenchmarkHeader << '\n';
  for (const BenchmarkRow& r : rows) {
    out << to_string(r.method) << ',' << r.n << ',' << r.replicate << ',' << r.seed << ',';
    if (r.ok()) {
      out << format_double(r.rmse_embedding) << ',' << format_double(r.geodesic_error_rad) << ','
          << optional_field(r.kappa_error) << ',' << optional_field(r.wall_time_ms) << ','
          << format_double(r.mu_hat[0]) << ',' << format_double(r.mu_hat[1]) << ',' << format_double(r.mu_hat[2])
          << ',' << optional_field(r.kappa_hat);
    } else {
      out << ",,," << optional_field(r.wall_time_ms) << ",,,,";
    }
    out << ',' << r.status << '\n';
  }
}

std::vector<BenchmarkRow> read_benchmark_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  std::vector<BenchmarkRow> rows;
  auto col = [&](const char* name) {
    const auto c = t.column(name);
    if (!c) throw DataError(path.string() + ": missing column " + name);
    return *c;
  };
  const std::size_t c_method = col("method"), c_n = col("n"), c_rep = col("replicate"), c_seed = col("seed"),
                    c_rmse = col("rmse_embedding"), c_geo = col("geodesic_error_rad"), c_kerr = col("kappa_error"),
                    c_time = col("wall_time_ms"), c_x1 = col("mu_hat_x1"), c_x2 = col("mu_hat_x2"),
                    c_x3 = col("mu_hat_x3"), c_khat = col("kappa_hat"), c_status = col("status");
  for (const auto& f : t.rows) {
    if (f.size() < t.header.size()) throw DataError(path.string() + ": short row");
    BenchmarkRow r;
    r.method = parse_method(f[c_method]);
    r.n = std::stoull(f[c_n]);
    r.replicate = std::stoull(f[c_rep]);
    r.seed = std::stoull(f[c_seed]);
    r.status = f[c_status];
    r.kappa_error = parse_double(f[c_kerr]);
    r.wall_time_ms = parse_double(f[c_time]);
    r.kappa_hat = parse_double(f[c_khat]);
    if (r.ok()) {
      r.rmse_embedding = parse_double(f[c_rmse]).value_or(0.0);
      r.geodesic_error_rad = parse_double(f[c_geo]).value_or(0.0);
      r.mu_hat = Vector3d(parse_double(f[c_x1]).value_or(0.0), parse_double(f[c_x2]).value_or(0.0),
                          parse_double(f[c_x3]).value_or(0.0));
    }
    rows.push_back(r);
  }
  return rows;
}

nlohmann::ordered_json summarize_rows(const ExperimentConfig& config, std::span<const BenchmarkRow> rows,
                                      const std::string& primary_metric) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(config.experiment);
  j["primary_metric"] = primary_metric;
  j["seed"] = config.seed;
  j["replicates"] = config.replicates;
  j["n_grid"] = config.n_grid;
  auto stats = [](const std::vector<double>& v) {
    const ErrorSummary s = summarize(v);
    nlohmann::ordered_json o;
    o["mean"] = s.mean;
    o["sd"] = s.sd;
    return o;
  };
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (Method m : active_methods(config)) {
    for (std::size_t n : config.n_grid) {
      std::vector<double> rmse_v, geo_v, kappa_v;
      std::size_t failures = 0;
      for (const BenchmarkRow& r : rows) {
        if (r.method != m || r.n != n) continue;
        if (!r.ok()) {
          ++failures;
          continue;
        }
        rmse_v.push_back(r.rmse_embedding);
        geo_v.push_back(r.geodesic_error_rad);
        if (r.kappa_error) kappa_v.push_back(*r.kappa_error);
      }
      nlohmann::ordered_json e;
      e["method"] = to_string(m);
      e["n"] = n;
      e["count"] = rmse_v.size();
      e["failures"] = failures;
      e["rmse_embedding"] = stats(rmse_v);
      e["geodesic_error_rad"] = stats(geo_v);
      if (!kappa_v.empty()) e["kappa_error"] = stats(kappa_v);
      entries.push_back(e);
    }
  }
  j["summary"] = entries;
  return j;
}

namespace {

void write_outputs(const ExperimentConfig& config, const BenchmarkRun& run, const std::string& csv_name,
                   const std::string& json_name) {
  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(config.out_dir / csv_name);
    if (!out) throw DataError("cannot write " + (config.out_dir / csv_name).string());
    write_benchmark_csv(out, run.rows);
  }
  std::ofstream js(config.out_dir / json_name);
  if (!js) throw DataError("cannot write " + (config.out_dir / json_name).string());
  js << run.summary.dump(2) << '\n';
}

}  // namespace

BenchmarkRun run_benchmark(const ExperimentConfig& config) {
  BenchmarkRun run = run_benchmark_rows(config);
  run.summary = summarize_rows(config, run.rows, "rmse_embedding");
  write_outputs(config, run, "benchmark.csv", "summary.json");
  return run;
}

BenchmarkRun run_kappa_benchmark(const ExperimentConfig& config) {
  if (config.experiment != Experiment::VmfUnknownKappa) {
    throw ConfigError("kappa-benchmark requires experiment vmf_unknown_kappa (kappa is not estimated otherwise)");
  }
  BenchmarkRun run = run_benchmark_rows(config);
  run.summary = summarize_rows(config, run.rows, "kappa_error");
  write_outputs(config, run, "kappa_benchmark.csv", "kappa_summary.json");
  return run;
}

double initial_bearing_deg(const UnitVec& from, const UnitVec& to) {
  const auto [lat1, lon1] = to_lat_lon_degrees(from);
  const auto [lat2, lon2] = to_lat_lon_degrees(to);
  const double d = kPi / 180.0;
  const double p1 = lat1 * d, p2 = lat2 * d, dl = (lon2 - lon1) * d;
  const double y = std::sin(dl) * std::cos(p2);
  const double x = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
  return std::atan2(y, x) / d;
}

StormReport analyze_storms(const EventIngest& events, const Boundary& boundary, std::span<const Method> methods,
                           std::uint64_t seed, std::size_t starts) {
  StormReport report;
  report.events_read = events.records.size();
  report.rows_skipped = events.skipped;
  if (events.data.empty()) throw DataError("no events to analyze");

  Dataset inside;
  for (std::size_t i = 0; i < events.data.size(); ++i) {
    if (boundary.contains(events.data.points[i])) {
      inside.points.push_back(events.data.points[i]);
    } else {
      report.excluded_ids.push_back(i < events.records.size() ? events.records[i].id : std::to_string(i));
    }
  }
  if (!report.excluded_ids.empty()) {
    std::clog << "warning: " << report.excluded_ids.size() << " events lie outside the boundary and were excluded\n";
  }
  report.events_used = inside.size();
  if (inside.size() < 2) throw DataError("fewer than two events inside the boundary");

  const MleFit mle = mle_vmf(inside, true);
  report.fits.push_back({"mle", mle.params.mu(), mle.params.kappa(), std::nullopt, std::nullopt});

  EstimateOptions opts;
  opts.starts = starts;
  for (Method m : methods) {
    if (m != Method::TmsmHaversine && m != Method::TmsmProjected) continue;
    const ScalingFunction g = m == Method::TmsmHaversine ? ScalingFunction::haversine()
                                                         : ScalingFunction::projected(boundary);
    const EstimationResult est = estimate(ScaledDataset(inside, boundary, g), ModelKind::VmfMuKappa, std::nullopt,
                                          derive_seed(seed, 0, "estimate"), opts);
    StormFit fit{to_string(m), mean_direction(est.params), concentration(est.params), std::nullopt, std::nullopt};
    fit.bearing_from_mle_deg = initial_bearing_deg(mle.params.mu(), fit.mu);
    fit.distance_from_mle_rad = geodesic_angle(mle.params.mu(), fit.mu);
    report.fits.push_back(fit);
  }
  return report;
}

nlohmann::ordered_json StormReport::to_json() const {
  nlohmann::ordered_json j;
  j["events_read"] = events_read;
  j["rows_skipped"] = rows_skipped;
  j["events_used"] = events_used;
  j["events_excluded"] = excluded_ids;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const StormFit& f : fits) {
    const auto [lat, lon] = to_lat_lon_degrees(f.mu);
    nlohmann::ordered_json o;
    o["method"] = f.method;
    o["lat_deg"] = lat;
    o["lon_deg"] = lon;
    o["mu"] = {f.mu[0], f.mu[1], f.mu[2]};
    o["kappa"] = f.kappa;
    if (f.bearing_from_mle_deg) o["bearing_from_mle_deg"] = *f.bearing_from_mle_deg;
    if (f.distance_from_mle_rad) o["distance_from_mle_rad"] = *f.distance_from_mle_rad;
    arr.push_back(o);
  }
  j["fits"] = arr;
  return j;
}

StormReport run_storms(const std::filesystem::path& events_path, const std::filesystem::path& boundary_path,
                       std::span<const Method> methods, std::uint64_t seed, const std::filesystem::path& out_dir) {
  const EventIngest events = ingest_events(events_path);
  const Boundary boundary = read_boundary_csv(boundary_path);
  const StormReport report = analyze_storms(events, boundary, methods, seed);

  std::filesystem::create_directories(out_dir);
  std::ofstream js(out_dir / "storm_report.json");
  if (!js) throw DataError("cannot write " + (out_dir / "storm_report.json").string());
  js << report.to_json().dump(2) << '\n';

  std::ofstream pts(out_dir / "storm_points.csv");
  pts << "event_id,lat_deg,lon_deg\n";
  for (std::size_t i = 0; i < events.records.size(); ++i) {
    if (!boundary.contains(events.data.points[i])) continue;
    const auto& r = events.records[i];
    pts << sanitize(r.id) << ',' << format_double(r.lat) << ',' << format_double(r.lon) << '\n';
  }
  return report;
}

}  // namespace tmsm
