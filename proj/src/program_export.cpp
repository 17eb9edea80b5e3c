#include "convex_auction/program_export.hpp"

#include "convex_auction/virtual_values.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace convex_auction {

std::string_view to_string(ProgramKind kind) {
  switch (kind) {
    case ProgramKind::rrm_xp: return "rrm_xp";
    case ProgramKind::rrm_pseudo: return "rrm_pseudo";
    case ProgramKind::rrm_lb: return "rrm_lb";
    case ProgramKind::brm_xp_naive: return "brm_xp_naive";
    case ProgramKind::brm_xp: return "brm_xp";
    case ProgramKind::brm_pseudo: return "brm_pseudo";
    case ProgramKind::brm_xa: return "brm_xa";
    case ProgramKind::brm_xa_rel: return "brm_xa_rel";
    case ProgramKind::brm_xa_rel_trunc: return "brm_xa_rel_trunc";
  }
  return "unknown";
}

const std::vector<ProgramKind>& all_program_kinds() {
  static const std::vector<ProgramKind> kinds = {
      ProgramKind::rrm_xp,       ProgramKind::rrm_pseudo, ProgramKind::rrm_lb,
      ProgramKind::brm_xp_naive, ProgramKind::brm_xp,     ProgramKind::brm_pseudo,
      ProgramKind::brm_xa,       ProgramKind::brm_xa_rel, ProgramKind::brm_xa_rel_trunc};
  return kinds;
}

ProgramKind parse_program_kind(std::string_view name) {
  for (auto kind : all_program_kinds()) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown program: " + std::string(name));
}

std::map<std::string, std::size_t> ProgramDescription::constraint_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& c : constraints) ++out[c.family];
  return out;
}

std::map<std::string, std::size_t> ProgramDescription::variable_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& v : variables) ++out[v.substr(0, v.find('['))];
  return out;
}

namespace {

std::string number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string var(std::string_view base, Index i, Index j) {
  return std::string(base) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

// Linear combination "a*t1 - b*t2 + ..." over symbolic terms.
class Expression {
 public:
  Expression& add(double coefficient, std::string term) {
    if (coefficient != 0.0) terms_.emplace_back(coefficient, std::move(term));
    return *this;
  }

  std::string str() const {
    std::string out;
    for (const auto& [c, term] : terms_) {
      const bool negative = c < 0.0;
      const double magnitude = negative ? -c : c;
      if (out.empty()) {
        out += negative ? "-" : "";
      } else {
        out += negative ? " - " : " + ";
      }
      if (magnitude != 1.0) out += number(magnitude) + "*";
      out += term;
    }
    return out.empty() ? "0" : out;
  }

 private:
  std::vector<std::pair<double, std::string>> terms_;
};

class Builder {
 public:
  Builder(const AuctionInstance& instance, ProgramKind kind) : instance_(instance) { program_.kind = kind; }

  ProgramDescription build() {
    switch (program_.kind) {
      case ProgramKind::rrm_xp:
        ex_post_variables("x");
        ex_post_variables("p");
        objective_ex_post_payments();
        ex_post_feasibility();
        allocation_bounds();
        ex_post_monotonicity();
        ex_post_payment_formula();
        break;
      case ProgramKind::rrm_pseudo:
      case ProgramKind::rrm_lb:
        ex_post_variables("x");
        objective_ex_post_sqrt(program_.kind == ProgramKind::rrm_lb);
        ex_post_feasibility();
        allocation_bounds();
        ex_post_monotonicity();
        break;
      case ProgramKind::brm_xp_naive:
        ex_post_variables("x");
        ex_post_variables("p");
        interim_variables("xhat");
        interim_variables("phat");
        interim_variables("qhat");
        objective_interim_linear("phat");
        ex_post_feasibility();
        allocation_bounds();
        relate_interim("xhat_def", "xhat", "x", false);
        relate_interim("phat_def", "phat", "p", false);
        relate_interim("qhat_def", "qhat", "p", true);
        interim_monotonicity();
        interim_payment_formula("qhat", false);
        break;
      case ProgramKind::brm_xp:
        ex_post_variables("x");
        interim_variables("xhat");
        interim_variables("h");
        objective_interim_linear("h");
        ex_post_feasibility();
        allocation_bounds();
        relate_interim("xhat_def", "xhat", "x", false);
        interim_monotonicity();
        interim_payment_formula("h", true);
        break;
      case ProgramKind::brm_pseudo:
        ex_post_variables("x");
        interim_variables("xhat");
        objective_interim_sqrt(false, false);
        ex_post_feasibility();
        allocation_bounds();
        relate_interim("xhat_def", "xhat", "x", false);
        interim_monotonicity();
        break;
      case ProgramKind::brm_xa:
        interim_variables("xhat");
        interim_variables("h");
        objective_interim_linear("h");
        ex_ante_feasibility();
        interim_bounds(true);
        interim_monotonicity();
        interim_payment_formula("h", true);
        break;
      case ProgramKind::brm_xa_rel:
        interim_variables("xhat");
        objective_interim_sqrt(true, false);
        ex_ante_feasibility();
        interim_bounds(false);
        interim_monotonicity();
        break;
      case ProgramKind::brm_xa_rel_trunc:
        interim_variables("xhat");
        objective_interim_sqrt(true, true);
        ex_ante_feasibility();
        interim_bounds(true);
        interim_monotonicity();
        break;
    }
    return std::move(program_);
  }

 private:
  Index n() const { return instance_.num_bidders(); }
  Index P() const { return instance_.num_profiles(); }

  void constraint(std::string family, std::string name, const Expression& e, std::string relation, double rhs) {
    program_.constraints.push_back({std::move(family), std::move(name), e.str(), std::move(relation), rhs});
  }

  void ex_post_variables(std::string_view base) {
    for (Index i = 0; i < n(); ++i) {
      for (Index v = 0; v < P(); ++v) program_.variables.push_back(var(base, i, v));
    }
  }

  void interim_variables(std::string_view base) {
    for (Index i = 0; i < n(); ++i) {
      for (Index k = 0; k < instance_.space().types(i); ++k) program_.variables.push_back(var(base, i, k));
    }
  }

  void objective_ex_post_payments() {
    Expression e;
    for (Index v = 0; v < P(); ++v) {
      for (Index i = 0; i < n(); ++i) e.add(instance_.probability(v), var("p", i, v));
    }
    program_.objective = "max: " + e.str();
  }

  void objective_ex_post_sqrt(bool virtual_scores) {
    const auto table = virtual_values(instance_);
    Expression e;
    for (Index v = 0; v < P(); ++v) {
      for (Index i = 0; i < n(); ++i) {
        const Index k = instance_.space().digit(v, i);
        const double score = virtual_scores ? table.plus(i, k) : instance_.bidder(i).types[k];
        e.add(instance_.probability(v), "sqrt(" + number(score) + "*" + var("x", i, v) + ")");
      }
    }
    program_.objective = "max: " + e.str();
  }

  void objective_interim_linear(std::string_view base) {
    Expression e;
    for (Index i = 0; i < n(); ++i) {
      for (Index k = 0; k < instance_.space().types(i); ++k) {
        e.add(instance_.bidder(i).distribution.pmf(k), var(base, i, k));
      }
    }
    program_.objective = "max: " + e.str();
  }

  void objective_interim_sqrt(bool virtual_scores, bool split_root) {
    const auto table = virtual_values(instance_);
    Expression e;
    for (Index i = 0; i < n(); ++i) {
      for (Index k = 0; k < instance_.space().types(i); ++k) {
        const double score = virtual_scores ? table.plus(i, k) : instance_.bidder(i).types[k];
        const double f = instance_.bidder(i).distribution.pmf(k);
        if (split_root) {
          e.add(f * std::sqrt(score), "sqrt(" + var("xhat", i, k) + ")");
        } else {
          e.add(f, "sqrt(" + number(score) + "*" + var("xhat", i, k) + ")");
        }
      }
    }
    program_.objective = "max: " + e.str();
  }

  void ex_post_feasibility() {
    for (Index v = 0; v < P(); ++v) {
      Expression e;
      for (Index i = 0; i < n(); ++i) e.add(1.0, var("x", i, v));
      constraint("xp", "xp[" + std::to_string(v) + "]", e, "<=", 1.0);
    }
  }

  void allocation_bounds() {
    for (Index i = 0; i < n(); ++i) {
      for (Index v = 0; v < P(); ++v) {
        constraint("x_lower", var("x_lower", i, v), Expression().add(-1.0, var("x", i, v)), "<=", 0.0);
        constraint("x_upper", var("x_upper", i, v), Expression().add(1.0, var("x", i, v)), "<=", 1.0);
      }
    }
  }

  void ex_post_monotonicity() {
    const auto& space = instance_.space();
    for (Index i = 0; i < n(); ++i) {
      for (Index v = 0; v < P(); ++v) {
        const Index d = space.digit(v, i);
        if (d == 0) continue;
        Expression e;
        e.add(1.0, var("x", i, space.with_type(v, i, d - 1))).add(-1.0, var("x", i, v));
        constraint("mono", var("mono", i, v), e, "<=", 0.0);
      }
    }
  }

  void ex_post_payment_formula() {
    const auto& space = instance_.space();
    for (Index i = 0; i < n(); ++i) {
      const auto& z = instance_.bidder(i).types;
      for (Index v = 0; v < P(); ++v) {
        const Index l = space.digit(v, i);
        Expression e;
        e.add(1.0, var("p", i, v) + "^2");
        e.add(-z[l], var("x", i, v));
        for (Index j = 0; j < l; ++j) e.add(z.gap(j), var("x", i, space.with_type(v, i, j)));
        constraint("payment", var("payment", i, v), e, "==", 0.0);
      }
    }
  }

  void relate_interim(std::string family, std::string_view hat, std::string_view ex_post, bool squared) {
    const auto& space = instance_.space();
    for (Index i = 0; i < n(); ++i) {
      const Index s = space.stride(i);
      for (Index k = 0; k < space.types(i); ++k) {
        Expression e;
        e.add(1.0, var(hat, i, k));
        space.for_each_chain(i, [&](Index base) {
          const std::string term = var(ex_post, i, base + k * s) + (squared ? "^2" : "");
          e.add(-instance_.others_probability(i, base), term);
        });
        constraint(family, var(family, i, k), e, "==", 0.0);
      }
    }
  }

  void interim_monotonicity() {
    for (Index i = 0; i < n(); ++i) {
      for (Index k = 1; k < instance_.space().types(i); ++k) {
        Expression e;
        e.add(1.0, var("xhat", i, k - 1)).add(-1.0, var("xhat", i, k));
        constraint("mono", var("mono", i, k), e, "<=", 0.0);
      }
    }
  }

  void interim_payment_formula(std::string_view payment, bool squared) {
    for (Index i = 0; i < n(); ++i) {
      const auto& z = instance_.bidder(i).types;
      for (Index l = 0; l < z.size(); ++l) {
        Expression e;
        e.add(1.0, var(payment, i, l) + (squared ? "^2" : ""));
        e.add(-z[l], var("xhat", i, l));
        for (Index j = 0; j < l; ++j) e.add(z.gap(j), var("xhat", i, j));
        constraint("payment", var("payment", i, l), e, "==", 0.0);
      }
    }
  }

  void ex_ante_feasibility() {
    Expression e;
    for (Index i = 0; i < n(); ++i) {
      for (Index k = 0; k < instance_.space().types(i); ++k) {
        e.add(instance_.bidder(i).distribution.pmf(k), var("xhat", i, k));
      }
    }
    constraint("xa", "xa", e, "<=", 1.0);
  }

  void interim_bounds(bool upper) {
    for (Index i = 0; i < n(); ++i) {
      for (Index k = 0; k < instance_.space().types(i); ++k) {
        constraint("xhat_lower", var("xhat_lower", i, k), Expression().add(-1.0, var("xhat", i, k)), "<=", 0.0);
        if (upper) {
          constraint("xhat_upper", var("xhat_upper", i, k), Expression().add(1.0, var("xhat", i, k)), "<=", 1.0);
        }
      }
    }
  }

  const AuctionInstance& instance_;
  ProgramDescription program_;
};

}  // namespace

std::string ProgramDescription::to_text() const {
  std::ostringstream out;
  out << "OBJECTIVE " << objective << '\n';
  for (const auto& v : variables) out << "VARIABLE " << v << '\n';
  for (const auto& c : constraints) {
    out << "CONSTRAINT " << c.name << ": " << c.expression << ' ' << c.relation << ' ' << number(c.rhs) << '\n';
  }
  return out.str();
}

ProgramDescription export_program(const AuctionInstance& instance, ProgramKind kind) {
  return Builder(instance, kind).build();
}

}  // namespace convex_auction
