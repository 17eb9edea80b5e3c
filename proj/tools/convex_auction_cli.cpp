#include <CLI11.hpp>

#include "convex_auction/discretization.hpp"
#include "convex_auction/experiment.hpp"
#include "convex_auction/mechanism.hpp"
#include "convex_auction/oracle.hpp"
#include "convex_auction/program_export.hpp"
#include "convex_auction/serialization.hpp"
#include "convex_auction/verify.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

namespace ca = convex_auction;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 1;
constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

void print_verification(const ca::VerificationReport& report) {
  for (const auto& check : report.checks) {
    std::cout << "  " << ca::to_string(check.constraint) << ": ";
    if (!check.checked) {
      std::cout << "skipped (" << check.note << ")\n";
    } else {
      std::cout << (check.passed ? "pass" : "FAIL") << " (worst violation " << num(check.worst_violation) << ")\n";
    }
  }
}

void print_report(const std::string& method, const ca::MechanismReport& report) {
  std::cout << "method: " << method << '\n'
            << "objective_kind: " << ca::to_string(report.kind) << '\n'
            << "objective_value: " << num(report.objective_value) << '\n';
  if (report.revenue) std::cout << "revenue: " << num(*report.revenue) << '\n';
  std::cout << "runtime_ms: " << num(report.runtime_ms) << '\n';
  if (!report.warning.empty()) std::cout << "warning: " << report.warning << '\n';
  std::cout << "verification:\n";
  print_verification(report.verification);
}

struct Solved {
  ca::Mechanism mechanism;
  ca::MechanismReport report;
};

Solved solve(const std::string& method, const ca::AuctionInstance& instance, double epsilon, double grid) {
  ca::PipelineOptions options;
  options.greedy.epsilon = epsilon;
  options.method = method.ends_with("greedy") ? ca::AllocationMethod::greedy : ca::AllocationMethod::closed_form;
  const ca::OracleConfig oracle{grid};
  auto wrap = [](auto&& result) { return Solved{std::move(result.mechanism), std::move(result.report)}; };
  if (method == "surplus") return wrap(ca::surplus_maximizer(instance));
  if (method == "virtual_surplus") return wrap(ca::virtual_surplus_maximizer(instance));
  if (method.starts_with("pseudo_surplus_")) return wrap(ca::pseudo_surplus_maximizer(instance, options));
  if (method.starts_with("heur_rrm_")) return wrap(ca::heuristic_lb_rrm(instance, options));
  if (method.starts_with("heur_brm_")) return wrap(ca::heuristic_brm(instance, options));
  if (method == "ex_ante") return wrap(ca::ex_ante_mechanism(instance, false));
  if (method == "ex_ante_trunc") return wrap(ca::ex_ante_mechanism(instance, true));
  if (method == "exact_rrm") return wrap(ca::exact_rrm(instance, oracle));
  if (method == "exact_brm") return wrap(ca::exact_brm(instance, oracle));
  if (method == "exact_linear_rrm") return wrap(ca::exact_linear_rrm(instance, oracle));
  throw UsageError("unknown method '" + method + "'");
}

const std::vector<std::string> kSolveMethods = {
    "surplus",         "virtual_surplus", "pseudo_surplus_greedy", "pseudo_surplus_cf", "heur_rrm_greedy",
    "heur_rrm_cf",     "heur_brm_greedy", "heur_brm_cf",           "ex_ante",           "ex_ante_trunc",
    "exact_rrm",       "exact_brm",       "exact_linear_rrm"};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

ca::AuctionInstance instance_from(const std::string& dist, int n) {
  try {
    return ca::DistributionSpec::parse(dist).instance(n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auctions with quadratic perceived payments: solve, verify, discretize, export, experiment."};
  app.require_subcommand(1);

  std::string dist = "categorical:3,10,0.8";
  int bidders = 2;
  std::string method = "heur_brm_cf";
  double epsilon = 1e-3;
  double grid = 1e-3;
  std::string out_path;

  auto* solve_cmd = app.add_subcommand("solve", "Run one pipeline and report its objective and verification");
  solve_cmd->add_option("--dist", dist, "categorical:L,H,p | uniform:K | binomial:t,p")->capture_default_str();
  solve_cmd->add_option("--n", bidders, "Number of symmetric bidders")->check(CLI::PositiveNumber)->capture_default_str();
  solve_cmd->add_option("--method", method, "Pipeline")->check(CLI::IsMember(kSolveMethods))->capture_default_str();
  solve_cmd->add_option("--epsilon", epsilon, "Greedy increment (1/epsilon integral)")->capture_default_str();
  solve_cmd->add_option("--grid", grid, "Oracle grid step")->capture_default_str();
  solve_cmd->add_option("--out", out_path, "Write the mechanism file here");

  std::string mechanism_path;
  std::string constraints = "";
  auto* check_cmd = app.add_subcommand("check", "Verify a saved mechanism");
  check_cmd->add_option("mechanism", mechanism_path, "Mechanism file")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--constraints", constraints, "Comma list of ic,ir,bic,bir,xp,xa,bounds (default: by type)");

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate revenue bounds for a saved mechanism");
  bounds_cmd->add_option("mechanism", mechanism_path, "Mechanism file")->required()->check(CLI::ExistingFile);

  double delta = 0.1;
  auto* discretize_cmd = app.add_subcommand("discretize", "Round a saved mechanism's allocation to a grid");
  discretize_cmd->add_option("mechanism", mechanism_path, "Mechanism file")->required()->check(CLI::ExistingFile);
  discretize_cmd->add_option("--delta", delta, "Grid step (1/delta integral)")->capture_default_str();
  discretize_cmd->add_option("--out", out_path, "Write the rounded mechanism here");

  std::string program = "rrm_xp";
  std::vector<std::string> program_names;
  for (auto kind : ca::all_program_kinds()) program_names.emplace_back(ca::to_string(kind));
  auto* export_cmd = app.add_subcommand("export", "Print a mathematical program in plain text");
  export_cmd->add_option("--program", program, "Program")->check(CLI::IsMember(program_names))->capture_default_str();
  export_cmd->add_option("--dist", dist, "categorical:L,H,p | uniform:K | binomial:t,p")->capture_default_str();
  export_cmd->add_option("--n", bidders, "Number of symmetric bidders")->check(CLI::PositiveNumber)->capture_default_str();
  export_cmd->add_option("--out", out_path, "Output file (default stdout)");

  std::string config_path;
  std::string bidder_range;
  std::string methods;
  std::string output;
  double exp_epsilon = 0.0;
  double exp_grid = 0.0;
  int oracle_cap = 0;
  bool no_timing = false;
  std::string exp_dist;
  auto* experiment_cmd = app.add_subcommand("experiment", "Compare methods across bidder counts and write CSV");
  experiment_cmd->add_option("--config", config_path, "key=value config file (flags override it)")
      ->check(CLI::ExistingFile);
  experiment_cmd->add_option("--dist", exp_dist, "categorical:L,H,p | uniform:K | binomial:t,p");
  experiment_cmd->add_option("--bidders", bidder_range, "n or min..max");
  experiment_cmd->add_option("--methods", methods, "Comma-separated method list");
  experiment_cmd->add_option("--epsilon", exp_epsilon, "Greedy increment");
  experiment_cmd->add_option("--grid", exp_grid, "Oracle grid step");
  experiment_cmd->add_option("--oracle-cap", oracle_cap, "Largest n*|V| handed to exact methods");
  experiment_cmd->add_option("--output", output, "CSV path (default stdout)");
  experiment_cmd->add_flag("--no-timing", no_timing, "Write 0 in the runtime column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*solve_cmd) {
      const auto instance = instance_from(dist, bidders);
      const Solved solved = solve(method, instance, epsilon, grid);
      print_report(method, solved.report);
      if (!out_path.empty()) ca::write_mechanism_file(out_path, instance, solved.mechanism);
      return solved.report.verification.passed() ? kOk : kVerificationFailed;
    }
    if (*check_cmd) {
      const auto file = ca::read_mechanism_file(mechanism_path);
      std::vector<ca::Constraint> which;
      try {
        which = constraints.empty() ? ca::default_constraints(file.mechanism) : ca::parse_constraints(constraints);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto report = ca::verify(file.instance, file.mechanism, which);
      std::cout << "mechanism: " << file.mechanism.provenance << '\n';
      print_verification(report);
      return report.passed() ? kOk : kVerificationFailed;
    }
    if (*bounds_cmd) {
      const auto file = ca::read_mechanism_file(mechanism_path);
      const auto report = ca::bound_report(file.instance, file.mechanism);
      std::cout << "revenue: " << num(report.revenue) << '\n'
                << "robust_pseudo_surplus: " << num(report.robust_pseudo_surplus) << '\n'
                << "bayesian_pseudo_surplus: " << num(report.bayesian_pseudo_surplus) << '\n'
                << "virtual_sqrt_upper: " << num(report.virtual_sqrt_upper) << '\n'
                << "heuristic_lb_value: " << num(report.heuristic_lb_value) << '\n'
                << "surplus: " << num(report.surplus) << '\n'
                << "virtual_surplus: " << num(report.virtual_surplus) << '\n';
      for (const auto& check : report.checks) {
        std::cout << "  " << check.name << ": " << (check.passed ? "pass" : "FAIL") << " (slack " << num(check.slack)
                  << ")\n";
      }
      return report.passed() ? kOk : kVerificationFailed;
    }
    if (*discretize_cmd) {
      const auto file = ca::read_mechanism_file(mechanism_path);
      if (!file.mechanism.has_ex_post_allocation()) throw UsageError("mechanism has no ex-post allocation to round");
      const auto report = ca::discretization_gap(file.instance, file.mechanism.allocation, delta);
      std::cout << "delta: " << num(report.delta) << '\n'
                << "max_abs_residual: " << num(report.max_abs_residual) << '\n'
                << "perceived_payment_gap: " << num(report.perceived_payment_gap) << '\n'
                << "payment_bound_holds: " << (report.payment_bound_holds() ? "true" : "false") << '\n'
                << "revenue_star: " << num(report.revenue_star) << '\n'
                << "revenue_rounded: " << num(report.revenue_rounded) << '\n'
                << "revenue_gap: " << num(report.revenue_gap) << '\n';
      if (!out_path.empty()) {
        auto rounded = file.mechanism;
        rounded.provenance += "+rounded";
        rounded.allocation = ca::round_allocation(file.mechanism.allocation, file.instance, delta).allocation;
        rounded.robust_payments = ca::robust_payment(rounded.allocation, file.instance);
        rounded.interim_allocation.reset();
        rounded.interim_payments.reset();
        rounded.cost = ca::CostModel::quadratic;
        ca::write_mechanism_file(out_path, file.instance, rounded);
      }
      return report.payment_bound_holds() ? kOk : kVerificationFailed;
    }
    if (*export_cmd) {
      const auto instance = instance_from(dist, bidders);
      write_text(out_path, ca::export_program(instance, ca::parse_program_kind(program)).to_text());
      return kOk;
    }
    if (*experiment_cmd) {
      ca::ExperimentConfig config;
      std::map<std::string, std::string> settings;
      try {
        if (!config_path.empty()) settings = ca::read_config_file(config_path);
        if (!exp_dist.empty()) settings["distribution"] = exp_dist;
        if (!bidder_range.empty()) settings["bidders"] = bidder_range;
        if (experiment_cmd->count("--methods") > 0) settings["methods"] = methods;
        if (experiment_cmd->count("--epsilon") > 0) settings["epsilon"] = std::to_string(exp_epsilon);
        if (experiment_cmd->count("--grid") > 0) settings["oracle_grid"] = num(exp_grid);
        if (experiment_cmd->count("--oracle-cap") > 0) settings["oracle_cap"] = std::to_string(oracle_cap);
        if (!output.empty()) settings["output"] = output;
        if (no_timing) settings["timing"] = "false";
        config.apply(settings);
        config.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto outcome = ca::run_experiment(config);
      for (const auto& notice : outcome.notices) std::cerr << "notice: " << notice << '\n';
      write_text(config.output_path, ca::to_csv(outcome.rows, config.timing));
      bool verified = true;
      for (const auto& row : outcome.rows) verified = verified && row.verified;
      return verified ? kOk : kVerificationFailed;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ca::OracleRefusal& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kUsageError;
}
