#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spio/types.hpp"

namespace spio {

// Allowed third-party surface for one stage. `modules` are allowed whole
// (including submodules); `members` are "module:Name" pairs.
struct AllowSet {
  std::set<std::string> modules;
  std::set<std::string> members;

  bool operator==(const AllowSet&) const = default;
  AllowSet& merge(const AllowSet& other);
};

using Whitelist = std::array<AllowSet, 4>;  // indexed by stage_index

// Per-stage libraries and classes generated code may use.
Whitelist default_whitelist();
// Union of every stage's allow-set; used for end-to-end programs.
AllowSet union_allow_set(const Whitelist& whitelist);

bool is_stdlib_module(std::string_view root);

struct WhitelistViolation {
  StageId stage = StageId::kPreprocess;
  std::string identifier;
  int line_number = 1;
  bool operator==(const WhitelistViolation&) const = default;
};

struct WhitelistReport {
  std::vector<WhitelistViolation> violations;
  // True when the code could not be tokenized (e.g. an unterminated string)
  // and a plain per-line scan was used instead.
  bool fallback_scan = false;

  bool compliant() const { return violations.empty(); }
};

// Scans imports (plain, aliased, from-imports, dynamic imports by literal
// name) and attribute chains rooted at imported modules.
WhitelistReport check_whitelist(std::string_view code, StageId stage, const AllowSet& allow);
WhitelistReport check_whitelist(std::string_view code, StageId stage, const Whitelist& whitelist);

}  // namespace spio
