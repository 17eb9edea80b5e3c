#pragma once

#include "convex_auction/core.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace convex_auction {

enum class ProgramKind {
  rrm_xp,
  rrm_pseudo,
  rrm_lb,
  brm_xp_naive,
  brm_xp,
  brm_pseudo,
  brm_xa,
  brm_xa_rel,
  brm_xa_rel_trunc,
};

std::string_view to_string(ProgramKind kind);
ProgramKind parse_program_kind(std::string_view name);
const std::vector<ProgramKind>& all_program_kinds();

struct ProgramConstraint {
  /// Family name, e.g. "xp" or "mono".
  std::string family;
  /// Full name with indices, e.g. "xp[3]".
  std::string name;
  std::string expression;
  /// "<=" or "==".
  std::string relation;
  double rhs = 0.0;
};

/// A mathematical program written out symbolically.
///
/// Variables are named x[i][profile], p[i][profile], xhat[i][k], phat[i][k],
/// qhat[i][k] and h[i][k], with profiles in the instance's lexicographic order.
struct ProgramDescription {
  ProgramKind kind = ProgramKind::rrm_xp;
  std::string objective;
  std::vector<std::string> variables;
  std::vector<ProgramConstraint> constraints;

  std::size_t variable_count() const { return variables.size(); }
  std::size_t constraint_count() const { return constraints.size(); }
  std::map<std::string, std::size_t> constraint_counts() const;
  std::map<std::string, std::size_t> variable_counts() const;

  /// Objective line, then one VARIABLE line per variable, then one
  /// CONSTRAINT line per constraint.
  std::string to_text() const;
};

ProgramDescription export_program(const AuctionInstance& instance, ProgramKind kind);

}  // namespace convex_auction
