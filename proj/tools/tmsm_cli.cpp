// tmsm: simulate truncated spherical data, fit it, and run the benchmarks.

#include "tmsm/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>

using namespace tmsm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct RegionFlags {
  std::string boundary_path;
  std::optional<double> colatitude;
  std::string side{"greater"};

  std::optional<Boundary> build(bool degrees) const {
    if (!boundary_path.empty() && colatitude) throw ConfigError("--boundary and --colatitude are exclusive");
    if (!boundary_path.empty()) return read_boundary_csv(boundary_path);
    if (!colatitude) return std::nullopt;
    const double a0 = degrees ? *colatitude * std::numbers::pi / 180.0 : *colatitude;
    try {
      return Boundary::colatitude(a0, side == "less" ? Side::Less : Side::Greater);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

void add_region(CLI::App* cmd, RegionFlags& r) {
  cmd->add_option("--boundary", r.boundary_path, "Boundary polyline CSV (lat_deg,lon_deg or a_rad,b_rad)");
  cmd->add_option("--colatitude", r.colatitude, "Constant-colatitude boundary a0");
  cmd->add_option("--side", r.side, "Observed side of the colatitude boundary")
      ->check(CLI::IsMember({"greater", "less"}));
}

int all_failed(const BenchmarkRun& run) {
  for (const BenchmarkRow& r : run.rows) {
    if (r.ok()) return 0;
  }
  std::cerr << "error: every replicate failed\n";
  return kExitNumerical;
}

void print_json(const nlohmann::ordered_json& j, const std::string& out_dir, const std::string& name) {
  std::cout << j.dump(2) << '\n';
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream(std::filesystem::path(out_dir) / name) << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated score matching on the sphere"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir;
  bool degrees = false;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a truncated vMF or Kent sample");
  std::string sim_model = "vmf";
  double mu_a = std::numbers::pi / 2.0, mu_b = std::numbers::pi, kappa = 6.0, alpha = 0.0;
  std::vector<double> gamma1{1.0, 0.0, 0.0};
  std::size_t n = 1000;
  RegionFlags sim_region;
  sim->add_option("--model", sim_model)->check(CLI::IsMember({"vmf", "kent"}));
  sim->add_option("--mu-a", mu_a, "Polar angle of the mean direction");
  sim->add_option("--mu-b", mu_b, "Azimuth of the mean direction");
  sim->add_option("--kappa", kappa);
  sim->add_option("--alpha", alpha);
  sim->add_option("--gamma1", gamma1, "Major axis hint (3 numbers)")->expected(3);
  sim->add_option("--n", n, "Observed sample size");
  sim->add_option("--seed", seed);
  sim->add_option("--out-dir", out_dir);
  sim->add_flag("--degrees", degrees, "Angles on the command line are in degrees");
  add_region(sim, sim_region);

  // estimate
  auto* est = app.add_subcommand("estimate", "Fit a model to a dataset by truncated score matching");
  std::string data_path, est_model = "vmf_mu_kappa", g_name = "haversine";
  std::optional<double> known_kappa, known_alpha;
  std::optional<int> drop_axis;
  std::size_t starts = 8;
  RegionFlags est_region;
  est->add_option("--data", data_path, "Dataset CSV")->required();
  est->add_option("--model", est_model)->check(CLI::IsMember({"vmf_mu_only", "vmf_mu_kappa", "kent_frame"}));
  est->add_option("--g", g_name)->check(CLI::IsMember({"haversine", "projected", "unit"}));
  est->add_option("--drop-axis", drop_axis, "Axis dropped by projected g (0, 1 or 2)");
  est->add_option("--kappa", known_kappa, "Known concentration");
  est->add_option("--alpha", known_alpha, "Known Kent ovalness");
  est->add_option("--starts", starts);
  est->add_option("--seed", seed);
  est->add_option("--out-dir", out_dir);
  est->add_flag("--degrees", degrees, "Colatitude on the command line is in degrees");
  add_region(est, est_region);

  // benchmark / kappa-benchmark
  struct BenchFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates, workers;
    std::optional<std::string> out_dir, g;
    bool timing = false;
  };
  BenchFlags bench_flags, kappa_flags;
  auto add_bench = [](CLI::App* cmd, BenchFlags& f) {
    cmd->add_option("--config", f.config, "Experiment config JSON")->required();
    cmd->add_option("--seed", f.seed);
    cmd->add_option("--replicates", f.replicates);
    cmd->add_option("--workers", f.workers);
    cmd->add_option("--out-dir", f.out_dir);
    cmd->add_option("--g", f.g, "Run only the TMSM variant with this g")
        ->check(CLI::IsMember({"haversine", "projected"}));
    cmd->add_flag("--timing", f.timing, "Record wall_time_ms (output is then not reproducible)");
  };
  auto* bench = app.add_subcommand("benchmark", "Replicated RMSE benchmark");
  add_bench(bench, bench_flags);
  auto* kbench = app.add_subcommand("kappa-benchmark", "Replicated concentration benchmark");
  add_bench(kbench, kappa_flags);

  // storms
  auto* storms = app.add_subcommand("storms", "Fit event locations inside a boundary polyline");
  std::string events_path, storm_boundary;
  std::vector<std::string> storm_methods{"tmsm_haversine", "tmsm_projected"};
  storms->add_option("--events", events_path, "Event CSV with latitude/longitude columns")->required();
  storms->add_option("--boundary", storm_boundary, "Boundary polyline CSV")->required();
  storms->add_option("--methods", storm_methods, "TMSM variants to fit")
      ->check(CLI::IsMember({"tmsm_haversine", "tmsm_projected"}));
  storms->add_option("--seed", seed);
  storms->add_option("--out-dir", out_dir)->default_str(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const double ang = degrees ? std::numbers::pi / 180.0 : 1.0;

    if (*sim) {
      const UnitVec mu = to_euclidean(Spherical{mu_a * ang, mu_b * ang});
      ModelParams<double> truth = VmfParams<double>(mu, kappa);
      try {
        if (sim_model == "kent") truth = KentParams<double>(mu, Vector3d(gamma1[0], gamma1[1], gamma1[2]), kappa, alpha);
        else truth = VmfParams<double>(mu, kappa);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      const TruncatedSample s = sample_truncated({truth, n, sim_region.build(degrees), seed});
      if (out_dir.empty()) {
        write_dataset_csv(std::cout, s.data);
      } else {
        std::filesystem::create_directories(out_dir);
        write_dataset_csv(std::filesystem::path(out_dir) / "dataset.csv", s.data);
      }
      std::clog << "drew " << s.raw_draws << " points, kept " << s.data.size() << '\n';
      return 0;
    }

    if (*est) {
      const auto region = est_region.build(degrees);
      if (!region) throw ConfigError("estimate needs --boundary or --colatitude");
      const Dataset data = read_dataset_csv(data_path);
      ScalingFunction g = ScalingFunction::haversine();
      const GKind kind = parse_g_kind(g_name);
      if (kind == GKind::Projected) {
        g = drop_axis ? ScalingFunction::projected(*drop_axis) : ScalingFunction::projected(*region);
      } else if (kind == GKind::Unit) {
        g = ScalingFunction::unit();
      }
      const ModelKind model = parse_model_kind(est_model);
      std::optional<KnownShape> known;
      if (model != ModelKind::VmfMuKappa) {
        if (!known_kappa) throw ConfigError("--kappa is required for " + est_model);
        known = KnownShape{*known_kappa, known_alpha.value_or(0.0)};
      }
      EstimateOptions opts;
      opts.starts = starts;
      std::optional<ScaledDataset> scaled;
      try {
        scaled.emplace(data, *region, g);
      } catch (const std::domain_error& e) {
        throw DataError(e.what());
      }
      const EstimationResult r = estimate(*scaled, model, known, seed, opts);
      const UnitVec mu = mean_direction(r.params);
      const Spherical z = to_spherical(mu);
      nlohmann::ordered_json j;
      j["model"] = est_model;
      j["g"] = g_name;
      j["n"] = data.size();
      j["mu"] = {mu[0], mu[1], mu[2]};
      j["mu_a_rad"] = z.a;
      j["mu_b_rad"] = z.b;
      j["kappa"] = concentration(r.params);
      if (const auto* k = std::get_if<KentParams<double>>(&r.params)) {
        j["alpha"] = k->alpha();
        j["gamma1"] = {k->gamma1()[0], k->gamma1()[1], k->gamma1()[2]};
      }
      j["objective"] = r.objective;
      j["evaluations"] = r.evaluations;
      j["converged"] = r.converged;
      print_json(j, out_dir, "estimate.json");
      if (!std::isfinite(r.objective)) return kExitNumerical;
      return 0;
    }

    if (*bench || *kbench) {
      const BenchFlags& f = *bench ? bench_flags : kappa_flags;
      ExperimentConfig config = load_config(f.config);
      if (f.seed) config.seed = *f.seed;
      if (f.replicates) config.replicates = *f.replicates;
      if (f.workers) config.workers = *f.workers;
      if (f.out_dir) config.out_dir = *f.out_dir;
      if (f.g) config.g_kind = parse_g_kind(*f.g);
      if (f.timing) config.timing = true;
      config.validate();
      const BenchmarkRun run = *bench ? run_benchmark(config) : run_kappa_benchmark(config);
      std::clog << "wrote " << run.rows.size() << " rows to " << config.out_dir.string() << '\n';
      return all_failed(run);
    }

    if (*storms) {
      std::vector<Method> methods;
      for (const auto& m : storm_methods) methods.push_back(parse_method(m));
      const StormReport report = run_storms(events_path, storm_boundary, methods, seed, out_dir.empty() ? "." : out_dir);
      std::cout << report.to_json().dump(2) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
