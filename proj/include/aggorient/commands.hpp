#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "aggorient/serialize.hpp"

namespace aggorient::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kPartial = 2,
};

/// Flags accepted by every subcommand.
struct CommonOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  double alpha = 0.05;
  std::size_t mc_reps = 1000;
  std::filesystem::path out;
};

struct SimulateConfig {
  CommonOptions common;
  double r_x = 2.2;
  double r_y = 2.2;
  double minor_axis = 5.0;  // typical semi-minor axis, units
  double sigma = 0.03;      // sd of the log axis lengths
  double sigma_e = 0.1;     // sd of the boundary noise
  int grid = 400;
  double pixels_per_unit = 10.0;
  std::size_t noise_bins = 64;
  std::size_t cases = 50;
  std::size_t replicates = 1;
  std::string contact = "uniform";  // or "directed"
  double contact_gamma = 0.0;
  double contact_kappa = 10.0;
  double contact_radius = 0.7;
};

struct ClusterConfig {
  CommonOptions common;  // out is a directory
  std::filesystem::path data;    // dataset directory
  std::filesystem::path shapes;  // text file listing CSV or mask paths, one per line
  std::size_t k_max = 6;
  double min_split_ratio = 0.5;
  std::size_t max_points = 200;
};

struct AnalyzeConfig {
  CommonOptions common;  // out is the records file
  std::filesystem::path data;        // dataset directory
  std::filesystem::path triples;     // CSV with columns id,x,y,z
  std::filesystem::path categories;  // cluster report; overrides dataset categories
  std::size_t k_max = 6;             // when categories come from clustering
  double min_split_ratio = 0.5;
  std::size_t max_points = 200;
  double min_aspect = 1.4;
};

struct FitConfig {
  CommonOptions common;  // out is a directory
  std::filesystem::path records;
  std::size_t bins = 18;
  std::size_t curve_points = 181;
  std::size_t min_group = 5;
  bool include_flagged = false;
};

struct TestConfig {
  CommonOptions common;  // out is the report file
  std::filesystem::path records;
  std::filesystem::path sample;  // CSV with a theta column and optional group column
  std::vector<std::string> tests{"ks", "uniformity", "mean"};
  double gamma0 = 0.0;
  std::size_t min_group = 5;
  bool include_flagged = false;
};

struct PipelineConfig {
  SimulateConfig simulate;  // common.out is the run directory
  std::size_t max_points = 200;
  double min_aspect = 1.4;
  std::vector<std::string> tests{"ks", "uniformity", "mean"};
  double gamma0 = 0.0;
};

Json to_config_json(const SimulateConfig& c);
Json to_config_json(const ClusterConfig& c);
Json to_config_json(const AnalyzeConfig& c);
Json to_config_json(const FitConfig& c);
Json to_config_json(const TestConfig& c);
Json to_config_json(const PipelineConfig& c);

SimParams to_sim_params(const SimulateConfig& c);

/// Each command writes its outputs atomically, logs progress to `log` and
/// returns an ExitCode.
int cmd_simulate(const SimulateConfig& c, std::ostream& log);
int cmd_cluster(const ClusterConfig& c, std::ostream& log);
int cmd_analyze(const AnalyzeConfig& c, std::ostream& log);
int cmd_fit(const FitConfig& c, std::ostream& log);
int cmd_test(const TestConfig& c, std::ostream& log);
/// simulate -> analyze -> fit -> test under one run directory.
int cmd_pipeline(const PipelineConfig& c, std::ostream& log);

/// Angles grouped by (own category, partner category) from a records file.
struct AngleGroup {
  std::string id;  // "<category>|<partner category>"
  std::vector<double> values;
  std::size_t flagged = 0;  // angles from primaries below the aspect threshold
  bool normalized = true;   // every angle carries four-fold symmetry
};

/// Flagged angles are counted but left out unless include_flagged is set.
std::vector<AngleGroup> group_angles(const std::vector<AggregationRecord>& records,
                                     bool include_flagged = false);

/// Mixes a master seed with a unit index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace aggorient::cli
