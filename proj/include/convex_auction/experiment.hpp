#pragma once

#include "convex_auction/core.hpp"
#include "convex_auction/mechanism.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace convex_auction {

/// One of the three symmetric experiment distributions.
struct DistributionSpec {
  enum class Kind { categorical, uniform, binomial };

  Kind kind = Kind::categorical;
  double low = 3.0;
  double high = 10.0;
  double probability = 0.8;
  int count = 5;

  /// "categorical:L,H,p", "uniform:K" or "binomial:t,p".
  static DistributionSpec parse(std::string_view text);
  std::string label() const;
  Bidder<double> bidder() const;
  AuctionInstance instance(Index bidders) const;
};

const std::vector<std::string>& experiment_methods();

struct ExperimentConfig {
  DistributionSpec distribution{};
  int min_bidders = 1;
  int max_bidders = 1;
  std::vector<std::string> methods;
  double epsilon = 1e-3;
  double oracle_grid = 1e-3;
  Index oracle_max_profile_vars = 400;
  std::string output_path;
  bool timing = true;

  void validate() const;
  /// Applies key=value pairs (distribution, bidders, methods, epsilon,
  /// oracle_grid, oracle_cap, output, timing).
  void apply(const std::map<std::string, std::string>& settings);
};

/// key=value lines; '#' starts a comment; blank lines are ignored.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct ExperimentRow {
  std::string method;
  std::string distribution;
  int bidders = 0;
  ObjectiveKind kind = ObjectiveKind::revenue_robust;
  double value = 0.0;
  double runtime_ms = 0.0;
  bool verified = false;
};

struct ExperimentOutcome {
  std::vector<ExperimentRow> rows;
  std::vector<std::string> notices;
};

/// Runs every (method, n) pair; rows come back ordered by method (config
/// order) and then n. Exact methods above the oracle cap are skipped with a
/// notice.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Evaluates one named method on one instance.
ExperimentRow run_method(const std::string& method, const AuctionInstance& instance, const ExperimentConfig& config);

std::string csv_header();
std::string to_csv(const std::vector<ExperimentRow>& rows, bool timing = true);
std::string csv_field(std::string_view field);

}  // namespace convex_auction
