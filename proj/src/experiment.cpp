#include "convex_auction/experiment.hpp"

#include "convex_auction/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace convex_auction {
namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in{std::string(text)};
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) throw std::invalid_argument("bad number '" + token + "'");
    out.push_back(value);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  const int value = std::stoi(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad integer '" + text + "'");
  return value;
}

bool is_exact(const std::string& method) { return method == "exact_rrm" || method == "exact_brm"; }

}  // namespace

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("distribution must look like name:params");
  const auto name = text.substr(0, colon);
  const auto args = parse_numbers(text.substr(colon + 1));
  DistributionSpec spec;
  if (name == "categorical") {
    if (args.size() != 3) throw std::invalid_argument("categorical takes L,H,p");
    spec.kind = Kind::categorical;
    spec.low = args[0];
    spec.high = args[1];
    spec.probability = args[2];
  } else if (name == "uniform") {
    if (args.size() != 1) throw std::invalid_argument("uniform takes K");
    spec.kind = Kind::uniform;
    spec.count = static_cast<int>(args[0]);
    if (static_cast<double>(spec.count) != args[0]) throw std::invalid_argument("uniform K must be an integer");
  } else if (name == "binomial") {
    if (args.size() != 2) throw std::invalid_argument("binomial takes t,p");
    spec.kind = Kind::binomial;
    spec.count = static_cast<int>(args[0]);
    if (static_cast<double>(spec.count) != args[0]) throw std::invalid_argument("binomial t must be an integer");
    spec.probability = args[1];
  } else {
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
  }
  spec.bidder();
  return spec;
}

std::string DistributionSpec::label() const {
  switch (kind) {
    case Kind::categorical:
      return "categorical:" + format_number(low) + "," + format_number(high) + "," + format_number(probability);
    case Kind::uniform:
      return "uniform:" + std::to_string(count);
    case Kind::binomial:
      return "binomial:" + std::to_string(count) + "," + format_number(probability);
  }
  return {};
}

Bidder<double> DistributionSpec::bidder() const {
  switch (kind) {
    case Kind::categorical: return make_categorical(low, high, probability);
    case Kind::uniform: return make_uniform(count);
    case Kind::binomial: return make_binomial(count, probability);
  }
  throw std::logic_error("unreachable distribution kind");
}

AuctionInstance DistributionSpec::instance(Index bidders) const { return AuctionInstance::symmetric(bidder(), bidders); }

const std::vector<std::string>& experiment_methods() {
  static const std::vector<std::string> methods = {
      "exact_rrm",  "exact_brm",    "pseudo_surplus_greedy", "pseudo_surplus_cf", "heur_lb_greedy",
      "heur_lb_cf", "heur_rrm_rev", "heur_brm_rev",          "ex_ante",           "ex_ante_trunc"};
  return methods;
}

void ExperimentConfig::validate() const {
  if (min_bidders < 1 || max_bidders < min_bidders) throw std::invalid_argument("bidder range is empty");
  for (const auto& m : methods) {
    const auto& known = experiment_methods();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw std::invalid_argument("unknown method '" + m + "'");
    }
  }
  GreedyConfig{epsilon}.steps();
  OracleConfig{oracle_grid, oracle_max_profile_vars}.validate();
}

void ExperimentConfig::apply(const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) {
    if (key == "distribution") {
      distribution = DistributionSpec::parse(value);
    } else if (key == "bidders") {
      const auto dots = value.find("..");
      if (dots == std::string::npos) {
        min_bidders = max_bidders = parse_int(value);
      } else {
        min_bidders = parse_int(value.substr(0, dots));
        max_bidders = parse_int(value.substr(dots + 2));
      }
    } else if (key == "methods") {
      methods.clear();
      std::istringstream in(value);
      std::string token;
      while (std::getline(in, token, ',')) {
        token = trim(token);
        if (!token.empty()) methods.push_back(token);
      }
    } else if (key == "epsilon") {
      epsilon = std::stod(value);
    } else if (key == "oracle_grid") {
      oracle_grid = std::stod(value);
    } else if (key == "oracle_cap") {
      oracle_max_profile_vars = parse_int(value);
    } else if (key == "output") {
      output_path = value;
    } else if (key == "timing") {
      timing = value == "true" || value == "1" || value == "yes";
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    out[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }
  return out;
}

ExperimentRow run_method(const std::string& method, const AuctionInstance& instance, const ExperimentConfig& config) {
  ExperimentRow row;
  row.method = method;
  row.bidders = static_cast<int>(instance.num_bidders());
  PipelineOptions options;
  options.greedy.epsilon = config.epsilon;
  options.method = method.ends_with("greedy") ? AllocationMethod::greedy : AllocationMethod::closed_form;

  auto take = [&](const MechanismReport& report, double value, ObjectiveKind kind) {
    row.value = value;
    row.kind = kind;
    row.runtime_ms = report.runtime_ms;
    row.verified = report.verification.passed();
  };

  if (is_exact(method)) {
    const OracleConfig oracle{config.oracle_grid, config.oracle_max_profile_vars};
    const auto result = method == "exact_rrm" ? exact_rrm(instance, oracle) : exact_brm(instance, oracle);
    take(result.report, result.report.objective_value, ObjectiveKind::exact_oracle);
  } else if (method.starts_with("pseudo_surplus")) {
    const auto result = pseudo_surplus_maximizer(instance, options);
    take(result.report, result.report.objective_value, ObjectiveKind::pseudo_surplus);
  } else if (method.starts_with("heur_lb")) {
    const auto result = heuristic_lb_rrm(instance, options);
    take(result.report, result.report.objective_value, ObjectiveKind::heuristic_lower_bound);
  } else if (method == "heur_rrm_rev") {
    const auto result = heuristic_lb_rrm(instance, options);
    take(result.report, *result.report.revenue, ObjectiveKind::revenue_robust);
  } else if (method == "heur_brm_rev") {
    const auto result = heuristic_brm(instance, options);
    take(result.report, *result.report.revenue, ObjectiveKind::revenue_bayesian);
  } else if (method == "ex_ante" || method == "ex_ante_trunc") {
    const auto result = ex_ante_mechanism(instance, method == "ex_ante_trunc");
    take(result.report, result.report.objective_value, ObjectiveKind::ex_ante_bound);
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  return row;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentOutcome out;
  const std::string label = config.distribution.label();
  for (const auto& method : config.methods) {
    for (int n = config.min_bidders; n <= config.max_bidders; ++n) {
      const AuctionInstance instance = config.distribution.instance(n);
      if (is_exact(method) && instance.num_bidders() * instance.num_profiles() > config.oracle_max_profile_vars) {
        out.notices.push_back("skipping " + method + " at n=" + std::to_string(n) + ": " +
                              std::to_string(instance.num_bidders() * instance.num_profiles()) +
                              " allocation variables exceed the oracle cap of " +
                              std::to_string(config.oracle_max_profile_vars));
        continue;
      }
      ExperimentRow row = run_method(method, instance, config);
      row.distribution = label;
      if (!config.timing) row.runtime_ms = 0.0;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_header() { return "method,distribution,n_bidders,objective_kind,value,runtime_ms,verified\n"; }

std::string to_csv(const std::vector<ExperimentRow>& rows, bool timing) {
  std::string out = csv_header();
  for (const auto& row : rows) {
    out += csv_field(row.method) + "," + csv_field(row.distribution) + "," + std::to_string(row.bidders) + "," +
           std::string(to_string(row.kind)) + "," + format_number(row.value) + "," +
           (timing ? format_number(row.runtime_ms) : std::string("0")) + "," + (row.verified ? "true" : "false") +
           "\n";
  }
  return out;
}

}  // namespace convex_auction
