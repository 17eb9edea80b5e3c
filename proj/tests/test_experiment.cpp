#include <doctest.h>

#include "convex_auction/experiment.hpp"

#include <filesystem>
#include <fstream>

using namespace convex_auction;

TEST_CASE("distribution specs") {
  const auto cat = DistributionSpec::parse("categorical:3,10,0.8");
  CHECK(cat.label() == "categorical:3,10,0.8");
  CHECK(cat.instance(2).num_profiles() == 4);
  CHECK(DistributionSpec::parse("uniform:5").bidder().size() == 5);
  CHECK(DistributionSpec::parse("binomial:4,0.5").label() == "binomial:4,0.5");
  CHECK_THROWS_AS(DistributionSpec::parse("uniform"), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::parse("uniform:2.5"), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::parse("categorical:3,10"), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::parse("categorical:3,10,1"), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::parse("poisson:3"), std::invalid_argument);
}

TEST_CASE("config application and validation") {
  ExperimentConfig config;
  config.apply({{"distribution", "uniform:3"}, {"bidders", "2..4"}, {"methods", "heur_lb_cf, ex_ante"},
                {"epsilon", "0.01"}, {"timing", "false"}});
  CHECK(config.min_bidders == 2);
  CHECK(config.max_bidders == 4);
  CHECK(config.methods == std::vector<std::string>{"heur_lb_cf", "ex_ante"});
  CHECK_FALSE(config.timing);
  CHECK_NOTHROW(config.validate());

  ExperimentConfig bad_range;
  bad_range.apply({{"bidders", "4..2"}});
  CHECK_THROWS_AS(bad_range.validate(), std::invalid_argument);
  ExperimentConfig bad_method;
  bad_method.methods = {"nope"};
  CHECK_THROWS_AS(bad_method.validate(), std::invalid_argument);
  ExperimentConfig bad_key;
  CHECK_THROWS_AS(bad_key.apply({{"colour", "red"}}), std::invalid_argument);
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "convex_auction_experiment_test.cfg";
  {
    std::ofstream out(path);
    out << "# comment\n\ndistribution = binomial:2,0.25  # trailing\nbidders=3\n";
  }
  const auto settings = read_config_file(path);
  CHECK(settings.at("distribution") == "binomial:2,0.25");
  CHECK(settings.at("bidders") == "3");
  {
    std::ofstream out(path);
    out << "no equals sign\n";
  }
  CHECK_THROWS_AS(read_config_file(path), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("rows come out in method then bidder order") {
  ExperimentConfig config;
  config.distribution = DistributionSpec::parse("categorical:3,10,0.8");
  config.min_bidders = 1;
  config.max_bidders = 6;
  config.methods = {"heur_lb_cf", "heur_rrm_rev", "heur_brm_rev"};
  config.timing = false;
  const auto outcome = run_experiment(config);
  REQUIRE(outcome.rows.size() == 18);
  for (std::size_t r = 0; r < 18; ++r) {
    CHECK(outcome.rows[r].method == config.methods[r / 6]);
    CHECK(outcome.rows[r].bidders == static_cast<int>(r % 6) + 1);
    CHECK(outcome.rows[r].verified);
    CHECK(outcome.rows[r].runtime_ms == 0.0);
  }
  for (std::size_t n = 0; n < 6; ++n) {
    CHECK(outcome.rows[n].value <= outcome.rows[6 + n].value + 1e-9);
    CHECK(outcome.rows[6 + n].value <= outcome.rows[12 + n].value + 1e-9);
  }
  CHECK(to_csv(outcome.rows, false) == to_csv(run_experiment(config).rows, false));
}

TEST_CASE("exact methods above the cap are skipped with a notice") {
  ExperimentConfig config;
  config.distribution = DistributionSpec::parse("uniform:3");
  config.min_bidders = 1;
  config.max_bidders = 3;
  config.methods = {"exact_rrm", "heur_rrm_rev"};
  config.oracle_max_profile_vars = 20;
  const auto outcome = run_experiment(config);
  CHECK(outcome.rows.size() == 5);
  REQUIRE(outcome.notices.size() == 1);
  CHECK(outcome.notices[0].find("n=3") != std::string::npos);
}

TEST_CASE("csv") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(to_csv({}) == csv_header());

  ExperimentRow row;
  row.method = "heur_lb_cf";
  row.distribution = "categorical:3,10,0.8";
  row.bidders = 2;
  row.kind = ObjectiveKind::heuristic_lower_bound;
  row.value = 2.5;
  row.runtime_ms = 1.25;
  row.verified = true;
  CHECK(to_csv({row}) == csv_header() + "heur_lb_cf,\"categorical:3,10,0.8\",2,heuristic_lower_bound,2.5,1.25,true\n");
  CHECK(to_csv({row}, false) == csv_header() + "heur_lb_cf,\"categorical:3,10,0.8\",2,heuristic_lower_bound,2.5,0,true\n");
}
