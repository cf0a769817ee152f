#pragma once

// Simulation benchmarks (replicated truncated-sample experiments), the kappa
// benchmark, and the storm-event analysis driven by the command line tool.

#include "tmsm/baselines.hpp"
#include "tmsm/boundary_scaling.hpp"
#include "tmsm/estimator.hpp"
#include "tmsm/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tmsm {

enum class Experiment { VmfKnownKappa, VmfUnknownKappa, KentKnownShape, Storms };
enum class Method { TmsmHaversine, TmsmProjected, TruncSM, Mle };

std::string to_string(Experiment e);
std::string to_string(Method m);
std::string to_string(GKind g);
Experiment parse_experiment(const std::string& s);
Method parse_method(const std::string& s);
GKind parse_g_kind(const std::string& s);
ModelKind parse_model_kind(const std::string& s);

struct BoundarySpec {
  std::string type{"colatitude"};  // "colatitude" | "polyline" | "none"
  double a0{1.5707963267948966};
  Side side{Side::Greater};
  std::filesystem::path path;
  std::size_t resolution{Boundary::kDefaultResolution};

  /// nullopt for "none" (whole sphere observed).
  std::optional<Boundary> build() const;
};

struct TruthSpec {
  double mu_a{1.5707963267948966};
  double mu_b{3.141592653589793};
  double kappa{6.0};
  double alpha{0.0};
  Vector3d gamma1{1.0, 0.0, 0.0};

  UnitVec mu() const { return to_euclidean(Spherical{mu_a, mu_b}); }
  /// Kent when the experiment is kent_known_shape, vMF otherwise.
  ModelParams<double> model(Experiment experiment) const;
};

struct ExperimentConfig {
  Experiment experiment{Experiment::VmfKnownKappa};
  std::vector<std::size_t> n_grid{125, 250, 500, 1000, 2000};
  std::size_t replicates{64};
  std::uint64_t seed{1};
  std::optional<GKind> g_kind;  // restricts TMSM methods to one g when set
  std::vector<Method> methods{Method::TmsmHaversine, Method::TmsmProjected, Method::TruncSM, Method::Mle};
  BoundarySpec boundary{};
  TruthSpec truth{};
  std::filesystem::path out_dir{"."};
  std::size_t workers{1};
  bool timing{false};
  std::optional<int> drop_axis;  // projected g; default: axis nearest the region centroid
  std::size_t starts{8};

  /// Throws ConfigError.
  void validate() const;
};

/// Keys as in the README; unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct BenchmarkRow {
  Method method{Method::Mle};
  std::size_t n{0};
  std::size_t replicate{0};
  std::uint64_t seed{0};
  double rmse_embedding{0.0};
  double geodesic_error_rad{0.0};
  std::optional<double> kappa_error;
  std::optional<double> wall_time_ms;
  Vector3d mu_hat{Vector3d::Zero()};
  std::optional<double> kappa_hat;
  std::string status{"ok"};

  bool ok() const { return status == "ok"; }
};

inline constexpr const char* kBenchmarkHeader =
    "method,n,replicate,seed,rmse_embedding,geodesic_error_rad,kappa_error,wall_time_ms,"
    "mu_hat_x1,mu_hat_x2,mu_hat_x3,kappa_hat,status";

struct BenchmarkRun {
  std::vector<BenchmarkRow> rows;  // ordered by (method, n, replicate)
  nlohmann::ordered_json summary;
};

/// Seed of the dataset for grid point n and replicate r.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t n, std::size_t replicate);

/// Runs every configured method on one replicate. Failures become rows with
/// a non-"ok" status.
std::vector<BenchmarkRow> run_replicate(const ExperimentConfig& config, const std::optional<Boundary>& region,
                                        std::size_t n, std::size_t replicate);

/// All replicates, in memory, without writing files.
BenchmarkRun run_benchmark_rows(const ExperimentConfig& config);

/// Writes benchmark.csv and summary.json to config.out_dir.
BenchmarkRun run_benchmark(const ExperimentConfig& config);

/// Same protocol summarized on |kappa_hat - kappa*|; writes
/// kappa_benchmark.csv and kappa_summary.json. Requires vmf_unknown_kappa.
BenchmarkRun run_kappa_benchmark(const ExperimentConfig& config);

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows);
std::vector<BenchmarkRow> read_benchmark_csv(const std::filesystem::path& path);

/// Mean/sd per (method, n) of rmse, geodesic error and, where present,
/// kappa error, over successful rows.
nlohmann::ordered_json summarize_rows(const ExperimentConfig& config, std::span<const BenchmarkRow> rows,
                                      const std::string& primary_metric);

struct StormFit {
  std::string method;
  UnitVec mu;
  double kappa{0.0};
  std::optional<double> bearing_from_mle_deg;
  std::optional<double> distance_from_mle_rad;
};

struct StormReport {
  std::size_t events_read{0};
  std::size_t rows_skipped{0};
  std::size_t events_used{0};
  std::vector<std::string> excluded_ids;
  std::vector<StormFit> fits;

  nlohmann::ordered_json to_json() const;
};

/// Initial great-circle bearing from `from` to `to`, degrees clockwise from
/// north in (-180, 180].
double initial_bearing_deg(const UnitVec& from, const UnitVec& to);

/// Fits vMF by MLE and by TMSM (each g in `methods`) to the events inside the
/// boundary. Events outside are excluded with a warning. Throws DataError for
/// an empty or fully excluded event set.
StormReport analyze_storms(const EventIngest& events, const Boundary& boundary, std::span<const Method> methods,
                           std::uint64_t seed, std::size_t starts = 8);

/// Reads the files, runs analyze_storms, writes storm_report.json and
/// storm_points.csv (lat/lon passthrough of the events used) to out_dir.
StormReport run_storms(const std::filesystem::path& events_path, const std::filesystem::path& boundary_path,
                       std::span<const Method> methods, std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace tmsm
