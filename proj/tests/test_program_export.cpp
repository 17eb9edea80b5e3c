#include <doctest.h>

#include "convex_auction/program_export.hpp"

#include <set>
#include <sstream>

using namespace convex_auction;

namespace {

using Counts = std::map<std::string, std::size_t>;

struct Shape {
  std::size_t profiles;  // P = prod K_i
  std::size_t ex_post;   // N = n P
  std::size_t types;     // S = sum K_i
  std::size_t chain_mono;
  std::size_t interim_mono;
};

Shape shape_of(int n, int K) {
  Shape s{1, 0, 0, 0, 0};
  for (int i = 0; i < n; ++i) s.profiles *= static_cast<std::size_t>(K);
  s.ex_post = static_cast<std::size_t>(n) * s.profiles;
  s.types = static_cast<std::size_t>(n * K);
  s.chain_mono = static_cast<std::size_t>(n) * (s.profiles / static_cast<std::size_t>(K)) * static_cast<std::size_t>(K - 1);
  s.interim_mono = static_cast<std::size_t>(n * (K - 1));
  return s;
}

std::pair<Counts, Counts> expected(ProgramKind kind, int n, int K) {
  const Shape s = shape_of(n, K);
  switch (kind) {
    case ProgramKind::rrm_xp:
      return {{{"x", s.ex_post}, {"p", s.ex_post}},
              {{"xp", s.profiles}, {"x_lower", s.ex_post}, {"x_upper", s.ex_post}, {"mono", s.chain_mono}, {"payment", s.ex_post}}};
    case ProgramKind::rrm_pseudo:
    case ProgramKind::rrm_lb:
      return {{{"x", s.ex_post}},
              {{"xp", s.profiles}, {"x_lower", s.ex_post}, {"x_upper", s.ex_post}, {"mono", s.chain_mono}}};
    case ProgramKind::brm_xp_naive:
      return {{{"x", s.ex_post}, {"p", s.ex_post}, {"xhat", s.types}, {"phat", s.types}, {"qhat", s.types}},
              {{"xp", s.profiles}, {"x_lower", s.ex_post}, {"x_upper", s.ex_post}, {"xhat_def", s.types},
               {"phat_def", s.types}, {"qhat_def", s.types}, {"mono", s.interim_mono}, {"payment", s.types}}};
    case ProgramKind::brm_xp:
      return {{{"x", s.ex_post}, {"xhat", s.types}, {"h", s.types}},
              {{"xp", s.profiles}, {"x_lower", s.ex_post}, {"x_upper", s.ex_post}, {"xhat_def", s.types},
               {"mono", s.interim_mono}, {"payment", s.types}}};
    case ProgramKind::brm_pseudo:
      return {{{"x", s.ex_post}, {"xhat", s.types}},
              {{"xp", s.profiles}, {"x_lower", s.ex_post}, {"x_upper", s.ex_post}, {"xhat_def", s.types},
               {"mono", s.interim_mono}}};
    case ProgramKind::brm_xa:
      return {{{"xhat", s.types}, {"h", s.types}},
              {{"xa", 1}, {"xhat_lower", s.types}, {"xhat_upper", s.types}, {"mono", s.interim_mono}, {"payment", s.types}}};
    case ProgramKind::brm_xa_rel:
      return {{{"xhat", s.types}}, {{"xa", 1}, {"xhat_lower", s.types}, {"mono", s.interim_mono}}};
    case ProgramKind::brm_xa_rel_trunc:
      return {{{"xhat", s.types}},
              {{"xa", 1}, {"xhat_lower", s.types}, {"xhat_upper", s.types}, {"mono", s.interim_mono}}};
  }
  return {};
}

}  // namespace

TEST_CASE("program names round-trip") {
  CHECK(all_program_kinds().size() == 9);
  for (auto kind : all_program_kinds()) CHECK(parse_program_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_program_kind("rrm"), std::invalid_argument);
}

TEST_CASE("variable and constraint counts follow the size formulas") {
  for (auto [n, K] : {std::pair{2, 2}, std::pair{2, 5}, std::pair{3, 2}, std::pair{1, 3}}) {
    const auto instance = AuctionInstance::symmetric(make_uniform(K), n);
    for (auto kind : all_program_kinds()) {
      CAPTURE(to_string(kind));
      CAPTURE(n);
      CAPTURE(K);
      const auto program = export_program(instance, kind);
      const auto [variables, constraints] = expected(kind, n, K);
      CHECK(program.variable_counts() == variables);
      CHECK(program.constraint_counts() == constraints);
      std::set<std::string> names(program.variables.begin(), program.variables.end());
      CHECK(names.size() == program.variable_count());
    }
  }
}

TEST_CASE("small programs by hand") {
  const auto instance = AuctionInstance::symmetric(make_categorical(0.0, 100.0, 0.5), 2);
  const auto rrm = export_program(instance, ProgramKind::rrm_xp);
  CHECK(rrm.variable_count() == 16);
  CHECK(rrm.constraint_counts().at("xp") == 4);
  const auto xa = export_program(instance, ProgramKind::brm_xa);
  CHECK(xa.variable_count() == 8);
  CHECK(xa.constraint_counts().at("xa") == 1);
  CHECK(export_program(instance, ProgramKind::brm_xa_rel_trunc).constraint_counts().count("payment") == 0);
}

TEST_CASE("text format") {
  const auto instance = AuctionInstance::symmetric(make_categorical(0.0, 100.0, 0.5), 2);
  const auto program = export_program(instance, ProgramKind::brm_xa);
  const std::string text = program.to_text();
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("OBJECTIVE max: ", 0) == 0);
  std::size_t variables = 0;
  std::size_t constraints = 0;
  while (std::getline(in, line)) {
    if (line.rfind("VARIABLE ", 0) == 0) {
      CHECK(constraints == 0);
      ++variables;
    } else {
      CHECK(line.rfind("CONSTRAINT ", 0) == 0);
      CHECK((line.find(" <= ") != std::string::npos || line.find(" == ") != std::string::npos));
      ++constraints;
    }
  }
  CHECK(variables == program.variable_count());
  CHECK(constraints == program.constraint_count());
  CHECK(text.find("CONSTRAINT payment[0][1]: h[0][1]^2 - 100*xhat[0][1] + 100*xhat[0][0] == 0") != std::string::npos);
  CHECK(text.find("-0*") == std::string::npos);
}
